#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mginf/busy.hpp"
#include "mginf/transient.hpp"

namespace mginf {

enum class Regime { Light, HeavyRV };

std::string to_string(Regime regime);

/// Density of one summand in the geometric compound: c(t) / (1 - e^{-lambda b}).
double v_density(const QueueParams& params, double t);

/// int_0^inf e^{sx} v(x) dx for a light-tailed service law; +inf for s at or
/// beyond the Cramer abscissa. Throws RegimeError for heavy tails.
double v_star(const QueueParams& params, double s);

struct DecayRoot {
    double s1;
    // |q v*(s1) - 1|
    double residual;
    // No root below the abscissa: s1 is the abscissa itself.
    bool at_boundary;
};

/// Root of v*(s) = 1/q, q = 1 - e^{-lambda b}, bracketed in
/// [1e-9, 0.999 s*].
DecayRoot solve_decay_root(const QueueParams& params);

/// Regularly varying Z(y) = y^{-alpha} L(y) weighted by y^p.
struct KaramataSpec {
    double alpha;
    std::function<double(double)> slowly_varying;
    double p;
};

/// First-order approximation t^{p+1} Z(t) / (alpha - p - 1) of
/// int_t^inf y^p Z(y) dy. Exact when L is constant.
double karamata_tail(const KaramataSpec& spec, double t);

struct HeavyBound {
    double karamata;  // denominator (alpha - 1)
    double printed;   // denominator (alpha + 1)
};

inline constexpr double kDefaultEpsilon = 0.1;

/// e^{lambda b} (1 + eps) L(t) / (mu (alpha - 1) t^{alpha - 1}) for regularly
/// varying service with alpha > 2; both denominator variants are returned.
HeavyBound heavy_bound_variants(const QueueParams& params, const RegenTable& regen, double t, double eps);
double heavy_bound(const QueueParams& params, const RegenTable& regen, double t, double eps);

struct Condition5 {
    double sup;         // sup V(t)/V(2t) over admissible grid points
    double at_largest;  // the ratio at the largest admissible t
    double t_largest;
};

Condition5 condition5_check(const RegenTable& regen);

/// V(t)/V(2t), or NaN when 2t leaves the table or V(2t) <= 1e-12.
double v_halving_ratio(const RegenTable& regen, double t);

struct SmallOCheck {
    GridFunction ratio;  // u(t)/V(t)
    bool decreasing;     // ratio(10b) / ratio(T_max/2) >= 5
};

SmallOCheck u_small_o_check(const RegenTable& regen, double service_mean);

/// Least-squares slope of ln phi_exact against t (or ln t when `log_log`)
/// over `points` evenly spaced times in [t0, t1].
double fitted_phi_slope(const QueueParams& params, double t0, double t1, bool log_log, int points = 101);

struct SimOptions {
    std::size_t reps = 10000;
    std::uint64_t seed = 1;
};

struct ReportOptions {
    double epsilon = kDefaultEpsilon;
    std::optional<GridSpec> grid;
    double tol = 1e-4;
    std::optional<SimOptions> sim;
};

struct RateReport {
    Regime regime = Regime::Light;
    // Light: root s1; heavy: alpha - 1.
    double decay_rate = 0.0;
    std::optional<DecayRoot> root;
    std::optional<double> alpha;
    double mu = 0.0;
    double epsilon = kDefaultEpsilon;
    // Heavy bound is asserted only from here on; 0 for light tails.
    double t_asymptotic = 0.0;
    // Light: slope of ln phi on [5b,15b]; heavy: log-log slope on [20b,200b].
    double fitted_slope = 0.0;
    Condition5 condition5{};
    BusyTable busy;
    RegenTable regen;

    std::vector<double> times;
    std::vector<double> exact_curve;
    std::vector<double> bound_eq1;
    // Light: bound (1), the only explicit light-tail bound; heavy: Karamata
    // constant variant of the regenerative bound.
    std::vector<double> bound_curve;
    // Heavy only: the (alpha + 1) variant.
    std::vector<double> bound_curve_printed;
    std::vector<double> u_over_v;
    std::vector<double> v_halving;
    std::optional<std::vector<double>> empirical_curve;
    double empirical_standard_error = 0.0;
};

/// Assembles transient, busy, regeneration and (optionally) simulated
/// curves for one parameter set. Throws RegimeError for laws outside the
/// light and regularly varying (alpha > 2) regimes.
RateReport rate_report(const QueueParams& params, std::span<const double> t_grid, const ReportOptions& options,
                       Execution exec = Execution::parallel);

/// Regime of `params`, or RegimeError explaining why no rate bound applies.
Regime rate_regime(const QueueParams& params);

}  // namespace mginf
