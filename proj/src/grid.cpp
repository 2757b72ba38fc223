#include "mginf/grid.hpp"

#include <algorithm>
#include <cmath>

#include "mginf/errors.hpp"

namespace mginf {

double GridFunction::mass() const {
    if (values.size() < 2) {
        return 0.0;
    }
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        s += values[i];
    }
    return s * step;
}

double GridFunction::at(double t) const {
    if (values.empty()) {
        return 0.0;
    }
    if (t <= 0.0) {
        return values.front();
    }
    const double pos = t / step;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= values.size()) {
        return values.back();
    }
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
}

std::size_t grid_points(double step, double t_max) {
    if (!(step > 0.0) || !(t_max > step)) {
        throw ConfigError("grid needs 0 < h < T_max");
    }
    return static_cast<std::size_t>(std::llround(t_max / step)) + 1;
}

GridFunction GridFunction::sample(double step, double t_max, GridKind kind, const std::function<double(double)>& f) {
    GridFunction g{step, std::vector<double>(grid_points(step, t_max)), kind};
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        g.values[i] = f(g.time(i));
    }
    return g;
}

namespace kernels {

namespace {

inline double convolve_at(const double* f, const double* g, std::size_t i, double h) {
    if (i == 0) {
        return 0.0;
    }
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
        s += f[j] * g[i - j];
    }
    s -= 0.5 * (f[0] * g[i] + f[i] * g[0]);
    return s * h;
}

}  // namespace

void convolve_serial(const double* f, const double* g, double* out, std::size_t n, double h) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = convolve_at(f, g, i, h);
    }
}

void convolve_omp(const double* f, const double* g, double* out, std::size_t n, double h) {
    const auto count = static_cast<std::ptrdiff_t>(n);
    // Work per row grows linearly with i.
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        out[i] = convolve_at(f, g, static_cast<std::size_t>(i), h);
    }
}

}  // namespace kernels

GridFunction convolve(const GridFunction& f, const GridFunction& g, Execution exec) {
    if (f.step != g.step || f.size() != g.size()) {
        throw ConfigError("convolution operands must share step and horizon");
    }
    GridFunction out{f.step, std::vector<double>(f.size()), GridKind::density};
    if (exec == Execution::serial) {
        kernels::convolve_serial(f.values.data(), g.values.data(), out.values.data(), f.size(), f.step);
    } else {
        kernels::convolve_omp(f.values.data(), g.values.data(), out.values.data(), f.size(), f.step);
    }
    return out;
}

}  // namespace mginf
