#include "mginf/transient.hpp"

#include <algorithm>
#include <cmath>

#include "mginf/errors.hpp"

namespace mginf {

QueueParams::QueueParams(double lambda, ServiceModel service)
    : lambda_(lambda), service_(std::move(service)), b_(0.0) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("arrival rate lambda must be positive and finite");
    }
    b_ = mean(service_);
}

double rho_deficit(const QueueParams& params, double t) {
    return params.lambda() * tail_integral(params.service(), t);
}

double rho_of_t(const QueueParams& params, double t) {
    return std::max(0.0, params.rho() - rho_deficit(params, t));
}

double poisson_pmf(double m, int k) {
    if (k < 0) {
        return 0.0;
    }
    if (m == 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    return std::exp(k * std::log(m) - m - std::lgamma(k + 1.0));
}

double pk_transient(const QueueParams& params, int k, double t) {
    return poisson_pmf(rho_of_t(params, t), k);
}

double pk_stationary(const QueueParams& params, int k) {
    return poisson_pmf(params.rho(), k);
}

int sup_truncation(double rho) {
    return static_cast<int>(std::ceil(rho + 10.0 * std::sqrt(rho) + 30.0));
}

double phi_exact(const QueueParams& params, double t) {
    const double rho_t = rho_of_t(params, t);
    const double rho = params.rho();
    const int kmax = sup_truncation(rho);
    double sup = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        sup = std::max(sup, std::abs(poisson_pmf(rho_t, k) - poisson_pmf(rho, k)));
    }
    return sup;
}

double c_rho(const QueueParams& params) {
    const double rho = params.rho();
    const double mode = std::floor(rho);
    if (mode == 0.0) {
        return 2.0;
    }
    return 2.0 * std::exp(mode * std::log(rho) - std::lgamma(mode + 1.0));
}

double phi_bound_eq1(const QueueParams& params, double t) {
    return c_rho(params) * rho_deficit(params, t);
}

namespace {

void fill_point(const QueueParams& params, TransientCurve& c, std::size_t i) {
    const double t = c.times[i];
    c.rho_t[i] = rho_of_t(params, t);
    c.phi[i] = phi_exact(params, t);
    c.bound_eq1[i] = phi_bound_eq1(params, t);
}

}  // namespace

TransientCurve transient_curve(const QueueParams& params, std::span<const double> times, Execution exec) {
    for (double t : times) {
        if (!(t >= 0.0)) {
            throw DomainError("transient curve times must be nonnegative");
        }
    }
    const std::size_t n = times.size();
    TransientCurve c{std::vector<double>(times.begin(), times.end()), std::vector<double>(n),
                     std::vector<double>(n), std::vector<double>(n)};
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < n; ++i) {
            fill_point(params, c, i);
        }
        return c;
    }
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        fill_point(params, c, static_cast<std::size_t>(i));
    }
    return c;
}

}  // namespace mginf
