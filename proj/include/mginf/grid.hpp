#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mginf/parallel.hpp"

namespace mginf {

enum class GridKind { density, tail, curve };

/// Nonnegative function sampled at 0, h, 2h, ..., (n-1)h.
struct GridFunction {
    double step = 0.0;
    std::vector<double> values;
    GridKind kind = GridKind::curve;

    std::size_t size() const noexcept { return values.size(); }
    double t_max() const noexcept { return values.empty() ? 0.0 : step * static_cast<double>(values.size() - 1); }
    double time(std::size_t i) const noexcept { return step * static_cast<double>(i); }

    // Trapezoid integral over the whole grid.
    double mass() const;

    // Linear interpolation; t beyond the grid clamps to the last value.
    double at(double t) const;

    static GridFunction sample(double step, double t_max, GridKind kind, const std::function<double(double)>& f);
};

/// Number of grid points for a step and horizon: round(t_max / step) + 1.
std::size_t grid_points(double step, double t_max);

/// Trapezoid-rule convolution (f * g)(x_i) = int_0^{x_i} f(y) g(x_i - y) dy on
/// a common grid. Throws ConfigError on mismatched grids.
GridFunction convolve(const GridFunction& f, const GridFunction& g, Execution exec = Execution::parallel);

namespace kernels {

// Raw kernels writing into `out` (same length as f and g).
void convolve_serial(const double* f, const double* g, double* out, std::size_t n, double h);
void convolve_omp(const double* f, const double* g, double* out, std::size_t n, double h);

}  // namespace kernels

}  // namespace mginf
