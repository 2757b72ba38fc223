#include "mginf/busy.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <variant>

#include "mginf/errors.hpp"

namespace mginf {

namespace {

bool light_tailed(const QueueParams& params) {
    return std::holds_alternative<LightTail>(classify_tail(params.service()));
}

void clamp_monotone(std::vector<double>& v) {
    double running = 1.0;
    for (double& x : v) {
        x = std::clamp(x, 0.0, 1.0);
        running = std::min(running, x);
        x = running;
    }
}

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

// Log-linear (exponential) or log-log (power) slope of the tail over the
// last `fraction` of the grid.
double tail_slope(const GridFunction& f, double fraction, bool log_log) {
    const std::size_t n = f.size();
    const auto first = static_cast<std::size_t>(static_cast<double>(n - 1) * (1.0 - fraction));
    std::vector<double> xs, ys;
    for (std::size_t i = std::max<std::size_t>(first, 1); i < n; ++i) {
        if (f.values[i] > 1e-300) {
            xs.push_back(log_log ? std::log(f.time(i)) : f.time(i));
            ys.push_back(std::log(f.values[i]));
        }
    }
    if (xs.size() < 2) {
        return 0.0;
    }
    return fit_slope(xs, ys);
}

double exponential_extrapolation(const GridFunction& f, double fraction) {
    const double kappa = -tail_slope(f, fraction, false);
    return kappa > 0.0 ? f.values.back() / kappa : 0.0;
}

}  // namespace

GridSpec default_grid(const QueueParams& params) {
    const double b = params.service_mean();
    return {b / 200.0, (light_tailed(params) ? 40.0 : 200.0) * b};
}

double c_density(const QueueParams& params, double t) {
    return params.lambda() * sf(params.service(), t) * std::exp(-rho_of_t(params, t));
}

double busy_mean_closed(const QueueParams& params) {
    return std::expm1(params.rho()) / params.lambda();
}

double cycle_mean_closed(const QueueParams& params) {
    return std::exp(params.rho()) / params.lambda();
}

std::size_t series_terms_for(const QueueParams& params, double tol) {
    if (!(tol > 0.0)) {
        throw ConfigError("series tolerance must be positive");
    }
    const double rho = params.rho();
    const double log_q = std::log(-std::expm1(-rho));
    // q^N e^{rho} <= tol  <=>  N >= (ln tol - rho) / ln q
    const double n = std::ceil((std::log(tol) - rho) / log_q);
    if (!(n <= static_cast<double>(kMaxSeriesTerms))) {
        const double clipped = std::min(n, 1e18);
        throw SeriesTruncationError("busy-period series needs more than 10^4 terms for the requested tolerance",
                                    static_cast<std::size_t>(clipped));
    }
    return static_cast<std::size_t>(std::max(1.0, n));
}

BusyTable stadje_tail(const QueueParams& params, double h, double t_max, double tol, Execution exec) {
    if (!(h > 0.0)) {
        throw ConfigError("grid step h must be positive");
    }
    if (!(t_max >= 10.0 * params.service_mean() * (1.0 - 1e-12))) {
        throw ConfigError("T_max must be at least 10 mean service times");
    }
    const std::size_t terms = series_terms_for(params, tol);
    const double lambda = params.lambda();

    const GridFunction c =
        GridFunction::sample(h, t_max, GridKind::density, [&params](double t) { return c_density(params, t); });
    GridFunction term = c;
    std::vector<double> sum = c.values;
    for (std::size_t n = 2; n <= terms; ++n) {
        term = convolve(term, c, exec);
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += term.values[i];
        }
    }
    for (double& v : sum) {
        v /= lambda;
    }
    clamp_monotone(sum);

    BusyTable table;
    table.g_tail = GridFunction{h, std::move(sum), GridKind::tail};
    table.series_terms = terms;
    table.truncation_bound = std::pow(-std::expm1(-params.rho()), static_cast<double>(terms)) * std::exp(params.rho());
    table.grid_error_note = "trapezoid convolution on a uniform grid; error O(h) per term, controlled by halving h";
    table.lambda = lambda;
    table.rho = params.rho();
    return table;
}

RegenTable regen_tail(const QueueParams& params, const BusyTable& busy, Execution exec) {
    if (busy.lambda != params.lambda() || busy.rho != params.rho()) {
        throw ConfigError("busy table was built for different queue parameters");
    }
    const GridFunction& g = busy.g_tail;
    const double lambda = params.lambda();
    const double h = g.step;
    const std::size_t n = g.size();

    GridFunction idle{h, std::vector<double>(n), GridKind::density};
    for (std::size_t i = 0; i < n; ++i) {
        idle.values[i] = std::exp(-lambda * g.time(i));
    }
    GridFunction conv = convolve(g, idle, exec);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = idle.values[i] + lambda * conv.values[i];
    }
    clamp_monotone(f);

    RegenTable table;
    table.f_tail = GridFunction{h, std::move(f), GridKind::tail};
    table.mu = cycle_mean_closed(params);

    const GridFunction& ft = table.f_tail;
    const double t_end = ft.t_max();
    const TailClass tail = classify_tail(params.service());
    if (const auto* rv = std::get_if<RegularlyVaryingTail>(&tail)) {
        table.tail_correction = t_end * ft.values.back() / (rv->alpha - 1.0);
        const double alpha_fit = -tail_slope(ft, 0.1, true);
        const double alt = alpha_fit > 1.0 ? t_end * ft.values.back() / (alpha_fit - 1.0) : table.tail_correction;
        table.tail_correction_error = std::abs(alt - table.tail_correction);
    } else {
        table.tail_correction = exponential_extrapolation(ft, 0.1);
        table.tail_correction_error = std::abs(exponential_extrapolation(ft, 0.05) - table.tail_correction);
    }

    std::vector<double> v(n);
    v[n - 1] = table.tail_correction;
    for (std::size_t i = n - 1; i-- > 0;) {
        v[i] = v[i + 1] + 0.5 * h * (ft.values[i] + ft.values[i + 1]);
    }
    std::vector<double> u(n);
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            cum += 0.5 * h * (v[i - 1] + v[i]);
        }
        u[i] = ft.values[i] * cum;
    }
    table.v_of_t = GridFunction{h, std::move(v), GridKind::curve};
    table.u_of_t = GridFunction{h, std::move(u), GridKind::curve};
    return table;
}

}  // namespace mginf
