#pragma once

#include <cstddef>
#include <string>

#include "mginf/grid.hpp"
#include "mginf/transient.hpp"

namespace mginf {

struct GridSpec {
    double h;
    double t_max;
};

/// h = b/200; T_max = 40b for light tails and 200b otherwise.
GridSpec default_grid(const QueueParams& params);

/// Busy-period survival tabulated from the truncated convolution series.
struct BusyTable {
    GridFunction g_tail;
    std::size_t series_terms = 0;
    // Sup-norm bound on the discarded series terms: q^N e^{lambda b}.
    double truncation_bound = 0.0;
    std::string grid_error_note;
    double lambda = 0.0;
    double rho = 0.0;
};

/// Regeneration-cycle survival F and the integrals V(t), u(t) built from it.
struct RegenTable {
    GridFunction f_tail;
    double mu = 0.0;
    GridFunction v_of_t;
    GridFunction u_of_t;
    // Contribution of int_{T_max}^inf F(y) dy added to V, and an estimate of
    // its error.
    double tail_correction = 0.0;
    double tail_correction_error = 0.0;
};

/// Density of the first series term: lambda sf(t) e^{-rho(t)}.
double c_density(const QueueParams& params, double t);

/// Mean busy period (e^{lambda b} - 1) / lambda.
double busy_mean_closed(const QueueParams& params);

/// Mean regeneration cycle e^{lambda b} / lambda.
double cycle_mean_closed(const QueueParams& params);

/// Smallest N with q^N e^{lambda b} <= tol, q = 1 - e^{-lambda b}.
std::size_t series_terms_for(const QueueParams& params, double tol);

inline constexpr std::size_t kMaxSeriesTerms = 10000;

/// Busy-period survival G(t) = lambda^{-1} sum_{n=1}^N c^{*n}(t) on a uniform
/// grid, clamped to [0,1] and monotonized by running minimum.
///
/// Throws SeriesTruncationError when more than kMaxSeriesTerms terms would be
/// needed to reach `tol`.
BusyTable stadje_tail(const QueueParams& params, double h, double t_max, double tol,
                      Execution exec = Execution::parallel);

/// F(x) = e^{-lambda x} + lambda int_0^x G(x - y) e^{-lambda y} dy by
/// trapezoid quadrature, plus V(t) = int_t^inf F and u(t) = F(t) int_0^t V.
RegenTable regen_tail(const QueueParams& params, const BusyTable& busy, Execution exec = Execution::parallel);

}  // namespace mginf
