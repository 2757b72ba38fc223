#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mginf/busy.hpp"
#include "mginf/errors.hpp"
#include "mginf/sim.hpp"

using namespace mginf;

namespace {

const QueueParams& light_params() {
    static const QueueParams p(1.0, ServiceModel::exponential(1.0));
    return p;
}

const BusyTable& light_table() {
    static const BusyTable t = stadje_tail(light_params(), 1.0 / 200.0, 40.0, 1e-4);
    return t;
}

const RegenTable& light_regen() {
    static const RegenTable r = regen_tail(light_params(), light_table());
    return r;
}

const QueueParams& heavy_params() {
    static const QueueParams p(1.0, ServiceModel::lomax(3.0, 1.0));
    return p;
}

// Coarser than the default step to keep the unit suite fast; the acceptance
// suite uses the default grid.
const BusyTable& heavy_table() {
    static const BusyTable t = stadje_tail(heavy_params(), 0.01, 100.0, 1e-4);
    return t;
}

const RegenTable& heavy_regen() {
    static const RegenTable r = regen_tail(heavy_params(), heavy_table());
    return r;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("first series term c(t)") {
    const auto& p = light_params();
    CHECK(c_density(p, 0.0) == doctest::Approx(1.0));
    CHECK(c_density(p, 1.0) == doctest::Approx(std::exp(-1.0 - (1.0 - std::exp(-1.0)))).epsilon(1e-14));
    for (double t = 0.0; t < 20.0; t += 0.1) {
        CHECK(c_density(p, t) <= p.lambda());
    }
    // Total mass 1 - e^{-lambda b}, checked by quadrature for several laws.
    using boost::math::quadrature::gauss_kronrod;
    for (const auto& m : {ServiceModel::exponential(1.0), ServiceModel::erlang(2, 3.0), ServiceModel::lomax(3.0, 1.0)}) {
        for (double lambda : {0.5, 1.0, 2.0}) {
            QueueParams q(lambda, m);
            const double mass = gauss_kronrod<double, 61>::integrate(
                [&q](double t) { return c_density(q, t); }, 0.0, std::numeric_limits<double>::infinity(), 25, 1e-13);
            CHECK(mass == doctest::Approx(-std::expm1(-q.rho())).epsilon(1e-8));
        }
    }
}

TEST_CASE("closed-form busy and cycle means") {
    CHECK(busy_mean_closed(light_params()) == doctest::Approx(M_E - 1.0).epsilon(1e-14));
    CHECK(busy_mean_closed(QueueParams(2.0, ServiceModel::exponential(2.0))) ==
          doctest::Approx((M_E - 1.0) / 2.0).epsilon(1e-14));
    const QueueParams tiny(1e-6, ServiceModel::exponential(1.0));
    CHECK(std::abs(busy_mean_closed(tiny) - 1.0) < 1e-5);
    CHECK(cycle_mean_closed(light_params()) == doctest::Approx(M_E).epsilon(1e-14));
}

TEST_CASE("series length and truncation certificate") {
    const auto& p = light_params();
    const double q = 1.0 - std::exp(-1.0);
    const std::size_t n = series_terms_for(p, 1e-4);
    CHECK(std::pow(q, n) * M_E <= 1e-4);
    CHECK(std::pow(q, n - 1) * M_E > 1e-4);
    CHECK(light_table().series_terms == n);
    CHECK(light_table().truncation_bound == doctest::Approx(std::pow(q, n) * M_E));

    try {
        series_terms_for(QueueParams(30.0, ServiceModel::exponential(1.0)), 1e-4);
        FAIL("expected SeriesTruncationError");
    } catch (const SeriesTruncationError& e) {
        CHECK(e.required_terms() > kMaxSeriesTerms);
    }
    CHECK_THROWS_AS(stadje_tail(p, 0.01, 5.0, 1e-4), ConfigError);
    CHECK_THROWS_AS(stadje_tail(p, 0.0, 40.0, 1e-4), ConfigError);
    CHECK_THROWS_AS(series_terms_for(p, 0.0), ConfigError);
}

TEST_CASE("busy-period table boundary and integral identities") {
    const auto& t = light_table();
    const double h = t.g_tail.step;
    CHECK(std::abs(t.g_tail.values[0] - 1.0) < 1e-4 + 5 * h);
    // int_0^inf G = (e^{lambda b} - 1)/lambda
    CHECK(std::abs(t.g_tail.mass() - (M_E - 1.0)) < 1e-4 * 40.0 + 1e-3);
}

TEST_CASE("tables are bounded and nonincreasing; F dominates the idle tail") {
    for (const auto* pair : {&light_regen(), &heavy_regen()}) {
        const auto& f = pair->f_tail.values;
        CHECK(f[0] == 1.0);
        for (std::size_t i = 1; i < f.size(); ++i) {
            CHECK(f[i] <= f[i - 1]);
            CHECK(f[i] >= 0.0);
        }
    }
    for (const auto* busy : {&light_table(), &heavy_table()}) {
        const auto& g = busy->g_tail.values;
        for (std::size_t i = 1; i < g.size(); ++i) {
            CHECK(g[i] <= g[i - 1]);
            CHECK(g[i] >= 0.0);
        }
    }
    const auto& f = light_regen().f_tail;
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(f.values[i] >= std::exp(-f.time(i)));
    }
    const auto& fh = heavy_regen().f_tail;
    for (std::size_t i = 0; i < fh.size(); ++i) {
        CHECK(fh.values[i] >= std::exp(-fh.time(i)));
    }
}

TEST_CASE("regeneration table: mean, V and u") {
    const auto& r = light_regen();
    CHECK(r.mu == doctest::Approx(M_E));
    CHECK(std::abs(r.v_of_t.values[0] - r.mu) < 1e-3 + r.tail_correction_error);
    CHECK(r.u_of_t.values[0] == 0.0);
    for (std::size_t i = 1; i < r.v_of_t.size(); ++i) {
        CHECK(r.v_of_t.values[i] <= r.v_of_t.values[i - 1]);
    }
    const auto& rh = heavy_regen();
    CHECK(rh.mu == doctest::Approx(std::exp(0.5)));
    CHECK(std::abs(rh.v_of_t.values[0] - rh.mu) < 1e-3 + rh.tail_correction_error);
    // Karamata extrapolation beyond T_max is a visible contribution for the
    // heavy law.
    CHECK(rh.tail_correction > 1e-5);

    QueueParams other(2.0, ServiceModel::exponential(1.0));
    CHECK_THROWS_AS(regen_tail(other, light_table()), ConfigError);
}

TEST_CASE("heavy-tail equivalence of busy and cycle tails") {
    const auto& g = heavy_table().g_tail;
    const auto& f = heavy_regen().f_tail;
    const double b = heavy_params().service_mean();
    const double e_rho = std::exp(heavy_params().rho());
    double prev = INFINITY;
    // The ratios approach 1 like 1 + O(1/t); the [0.8,1.2] band is entered
    // just past t = 40b for this law.
    for (double t = 50.0 * b; t <= g.t_max(); t += 1.0) {
        const double gt = g.at(t);
        const double ratio_g = gt / (e_rho * sf(heavy_params().service(), t));
        const double ratio_f = f.at(t) / gt;
        CHECK(ratio_g >= 0.8);
        CHECK(ratio_g <= 1.2);
        CHECK(ratio_f >= 0.8);
        CHECK(ratio_f <= 1.2);
        CHECK(ratio_g <= prev + 1e-3);
        prev = ratio_g;
    }
    CHECK(std::abs(g.at(g.t_max()) / (e_rho * sf(heavy_params().service(), g.t_max())) - 1.0) < 0.05);
}

TEST_CASE("light-tail decay of the busy period") {
    const auto& g = light_table().g_tail;
    std::vector<double> x, y;
    for (double t = 5.0; t <= 15.0; t += 0.05) {
        x.push_back(t);
        y.push_back(std::log(g.at(t)));
    }
    const double slope = fit_slope(x, y);
    MESSAGE("fitted ln G slope on [5b,15b]: " << slope);
    CHECK(slope < -0.05);
}

TEST_CASE("grid refinement converges consistently") {
    const auto& p = light_params();
    const BusyTable coarse = stadje_tail(p, 0.04, 10.0, 1e-6);
    const BusyTable mid = stadje_tail(p, 0.02, 10.0, 1e-6);
    const BusyTable fine = stadje_tail(p, 0.01, 10.0, 1e-6);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < coarse.g_tail.size(); ++i) {
        const double t = coarse.g_tail.time(i);
        d1 = std::max(d1, std::abs(coarse.g_tail.at(t) - mid.g_tail.at(t)));
        d2 = std::max(d2, std::abs(mid.g_tail.at(t) - fine.g_tail.at(t)));
    }
    CHECK(d2 < d1);
    CHECK(d2 < 4.0 * d1);
    // Between first and second order.
    CHECK(d1 / d2 > 1.8);
    CHECK(d1 / d2 < 4.5);
}

TEST_CASE("serial and parallel table builds agree bit for bit") {
    const QueueParams p(1.5, ServiceModel::hyperexponential({0.5, 0.5}, {1.0, 2.0}));
    const BusyTable a = stadje_tail(p, 0.02, 10.0, 1e-5, Execution::serial);
    const BusyTable b = stadje_tail(p, 0.02, 10.0, 1e-5, Execution::parallel);
    CHECK(a.g_tail.values == b.g_tail.values);
    const RegenTable ra = regen_tail(p, a, Execution::serial);
    const RegenTable rb = regen_tail(p, b, Execution::parallel);
    CHECK(ra.f_tail.values == rb.f_tail.values);
    CHECK(ra.v_of_t.values == rb.v_of_t.values);
    CHECK(ra.u_of_t.values == rb.u_of_t.values);
}

TEST_CASE("busy-period table against simulation") {
    const auto& p = light_params();
    const std::size_t n = 100000;
    const auto cycles = run_cycles(p, n, 7);
    std::vector<double> busy(n);
    double above4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        busy[i] = cycles[i].busy_len;
        above4 += busy[i] > 4.0 ? 1.0 : 0.0;
    }
    const double emp = above4 / n;
    const double g4 = light_table().g_tail.at(4.0);
    CHECK(std::abs(emp - g4) < 3.0 * std::sqrt(g4 * (1.0 - g4) / n));

    const auto& tab = light_table();
    const double ks = ks_statistic(busy, [&tab](double x) { return 1.0 - tab.g_tail.at(x); });
    CHECK(ks < 1.95 / std::sqrt(static_cast<double>(n)) + tab.truncation_bound + 5 * tab.g_tail.step);

    std::vector<double> cyc(n);
    for (std::size_t i = 0; i < n; ++i) {
        cyc[i] = cycles[i].cycle_len;
    }
    const auto& reg = light_regen();
    const double ks_c = ks_statistic(cyc, [&reg](double x) { return 1.0 - reg.f_tail.at(x); });
    CHECK(ks_c < 1.95 / std::sqrt(static_cast<double>(n)) + tab.truncation_bound + 5 * tab.g_tail.step);
}

TEST_CASE("default grids") {
    const auto g = default_grid(light_params());
    CHECK(g.h == doctest::Approx(1.0 / 200.0));
    CHECK(g.t_max == doctest::Approx(40.0));
    const auto gh = default_grid(heavy_params());
    CHECK(gh.h == doctest::Approx(0.5 / 200.0));
    CHECK(gh.t_max == doctest::Approx(100.0));
}
