#include "mginf/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "mginf/errors.hpp"
#include "mginf/sim.hpp"

namespace mginf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double compound_q(const QueueParams& params) {
    return -std::expm1(-params.rho());
}

double cramer_abscissa(const QueueParams& params) {
    const TailClass tail = classify_tail(params.service());
    const auto* light = std::get_if<LightTail>(&tail);
    if (!light) {
        throw RegimeError("v*(s) is only defined for light-tailed (Cramer) service laws");
    }
    return light->cramer_abscissa;
}

double slope(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::string to_string(Regime regime) {
    return regime == Regime::Light ? "Light" : "HeavyRV";
}

double v_density(const QueueParams& params, double t) {
    return c_density(params, t) / compound_q(params);
}

double v_star(const QueueParams& params, double s) {
    const double s_max = cramer_abscissa(params);
    if (s >= s_max) {
        return kInf;
    }
    const double scale = params.lambda() / compound_q(params);
    const ServiceModel& service = params.service();
    auto log_integrand = [&](double x) { return s * x + log_sf(service, x) - rho_of_t(params, x); };

    // Truncate where the remaining mass is negligible.
    const double gap = std::isfinite(s_max) ? s_max - s : 1.0;
    double upper = std::max(10.0 * params.service_mean(), 1.0 / gap);
    while (scale * std::exp(log_integrand(upper)) / gap > 1e-14 && upper < 1e8) {
        upper *= 2.0;
    }
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double x) { return scale * std::exp(log_integrand(x)); };
    return gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 30, 1e-14);
}

DecayRoot solve_decay_root(const QueueParams& params) {
    const double s_abscissa = cramer_abscissa(params);
    const double q = compound_q(params);
    auto residual = [&](double s) { return q * v_star(params, s) - 1.0; };

    const double lo = 1e-9;
    double hi = 0.999 * s_abscissa;
    if (!std::isfinite(s_abscissa)) {
        hi = 1.0;
        for (int i = 0; i < 200 && residual(hi) < 0.0; ++i) {
            hi *= 2.0;
        }
    }
    const double r_hi = residual(hi);
    if (r_hi < 0.0) {
        return {s_abscissa, std::abs(r_hi), true};
    }
    const double r_lo = residual(lo);
    if (r_lo >= 0.0) {
        return {lo, std::abs(r_lo), false};
    }
    boost::uintmax_t iterations = 200;
    auto [a, b] = boost::math::tools::toms748_solve(residual, lo, hi, r_lo, r_hi,
                                                    boost::math::tools::eps_tolerance<double>(50), iterations);
    const double ra = std::abs(residual(a));
    const double rb = std::abs(residual(b));
    return ra <= rb ? DecayRoot{a, ra, false} : DecayRoot{b, rb, false};
}

double karamata_tail(const KaramataSpec& spec, double t) {
    if (!(spec.alpha - spec.p > 1.0)) {
        throw DomainError("karamata_tail needs alpha - p > 1 for integrability");
    }
    if (!(t > 0.0)) {
        throw DomainError("karamata_tail needs t > 0");
    }
    const double z = std::pow(t, -spec.alpha) * spec.slowly_varying(t);
    return std::pow(t, spec.p + 1.0) * z / (spec.alpha - spec.p - 1.0);
}

Regime rate_regime(const QueueParams& params) {
    const TailClass tail = classify_tail(params.service());
    if (std::holds_alternative<LightTail>(tail)) {
        return Regime::Light;
    }
    if (const auto* rv = std::get_if<RegularlyVaryingTail>(&tail)) {
        if (!(rv->alpha > 2.0)) {
            throw RegimeError("heavy-rate bounds require alpha > 2 (regularly varying regime)");
        }
        return Regime::HeavyRV;
    }
    throw RegimeError("no rate bound for subexponential laws that are not regularly varying");
}

HeavyBound heavy_bound_variants(const QueueParams& params, const RegenTable& regen, double t, double eps) {
    const TailClass tail = classify_tail(params.service());
    const auto* rv = std::get_if<RegularlyVaryingTail>(&tail);
    if (!rv) {
        throw RegimeError("heavy_bound needs a regularly varying service law");
    }
    if (!(rv->alpha > 2.0)) {
        throw RegimeError("heavy_bound needs alpha > 2");
    }
    if (!(eps >= 0.0)) {
        throw DomainError("heavy_bound needs eps >= 0");
    }
    if (!(t > 0.0)) {
        return {kInf, kInf};
    }
    const double alpha = rv->alpha;
    const double core =
        std::exp(params.rho()) * (1.0 + eps) * rv->slowly_varying(t) / (regen.mu * std::pow(t, alpha - 1.0));
    return {core / (alpha - 1.0), core / (alpha + 1.0)};
}

double heavy_bound(const QueueParams& params, const RegenTable& regen, double t, double eps) {
    return heavy_bound_variants(params, regen, t, eps).karamata;
}

Condition5 condition5_check(const RegenTable& regen) {
    const auto& v = regen.v_of_t.values;
    Condition5 out{0.0, kNaN, kNaN};
    for (std::size_t i = 0; 2 * i < v.size(); ++i) {
        if (v[2 * i] <= 1e-12) {
            continue;
        }
        const double r = v[i] / v[2 * i];
        out.sup = std::max(out.sup, r);
        out.at_largest = r;
        out.t_largest = regen.v_of_t.time(i);
    }
    return out;
}

double v_halving_ratio(const RegenTable& regen, double t) {
    const GridFunction& v = regen.v_of_t;
    if (!(t >= 0.0) || 2.0 * t > v.t_max() * (1.0 + 1e-12)) {
        return kNaN;
    }
    const double denom = v.at(2.0 * t);
    return denom > 1e-12 ? v.at(t) / denom : kNaN;
}

SmallOCheck u_small_o_check(const RegenTable& regen, double service_mean) {
    const GridFunction& v = regen.v_of_t;
    const GridFunction& u = regen.u_of_t;
    GridFunction ratio{v.step, std::vector<double>(v.size()), GridKind::curve};
    for (std::size_t i = 0; i < v.size(); ++i) {
        ratio.values[i] = v.values[i] > 0.0 ? u.values[i] / v.values[i] : kNaN;
    }
    const double early = ratio.at(10.0 * service_mean);
    const double late = ratio.at(0.5 * v.t_max());
    return {std::move(ratio), late > 0.0 && early / late >= 5.0};
}

double fitted_phi_slope(const QueueParams& params, double t0, double t1, bool log_log, int points) {
    std::vector<double> xs, ys;
    for (int i = 0; i < points; ++i) {
        const double t = t0 + (t1 - t0) * i / (points - 1);
        const double phi = phi_exact(params, t);
        if (phi > 0.0) {
            xs.push_back(log_log ? std::log(t) : t);
            ys.push_back(std::log(phi));
        }
    }
    if (xs.size() < 2) {
        return kNaN;
    }
    return slope(xs, ys);
}

RateReport rate_report(const QueueParams& params, std::span<const double> t_grid, const ReportOptions& options,
                       Execution exec) {
    const Regime regime = rate_regime(params);
    const double b = params.service_mean();
    const GridSpec grid = options.grid.value_or(default_grid(params));

    RateReport r;
    r.regime = regime;
    r.epsilon = options.epsilon;
    r.mu = cycle_mean_closed(params);
    r.busy = stadje_tail(params, grid.h, grid.t_max, options.tol, exec);
    r.regen = regen_tail(params, r.busy, exec);
    r.condition5 = condition5_check(r.regen);

    const TransientCurve curve = transient_curve(params, t_grid, exec);
    r.times = curve.times;
    r.exact_curve = curve.phi;
    r.bound_eq1 = curve.bound_eq1;

    const std::size_t n = r.times.size();
    r.u_over_v.resize(n);
    r.v_halving.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = r.times[i];
        const bool on_table = t <= r.regen.v_of_t.t_max() * (1.0 + 1e-12);
        const double v = r.regen.v_of_t.at(t);
        r.u_over_v[i] = on_table && v > 0.0 ? r.regen.u_of_t.at(t) / v : kNaN;
        r.v_halving[i] = v_halving_ratio(r.regen, t);
    }

    if (regime == Regime::Light) {
        r.root = solve_decay_root(params);
        r.decay_rate = r.root->s1;
        r.fitted_slope = fitted_phi_slope(params, 5.0 * b, 15.0 * b, false);
        r.bound_curve = r.bound_eq1;
    } else {
        const auto& rv = std::get<RegularlyVaryingTail>(classify_tail(params.service()));
        r.alpha = rv.alpha;
        r.decay_rate = rv.alpha - 1.0;
        r.t_asymptotic = 20.0 * b;
        r.fitted_slope = fitted_phi_slope(params, 20.0 * b, 200.0 * b, true);
        r.bound_curve.resize(n);
        r.bound_curve_printed.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const HeavyBound hb = heavy_bound_variants(params, r.regen, r.times[i], options.epsilon);
            r.bound_curve[i] = hb.karamata;
            r.bound_curve_printed[i] = hb.printed;
        }
    }

    if (options.sim) {
        std::vector<double> empirical(n);
        for (std::size_t i = 0; i < n; ++i) {
            empirical[i] = empirical_phi(params, r.times[i], options.sim->reps, options.sim->seed, exec).phi;
        }
        r.empirical_curve = std::move(empirical);
        r.empirical_standard_error = std::sqrt(1.0 / (4.0 * static_cast<double>(options.sim->reps)));
    }
    return r;
}

}  // namespace mginf
