#pragma once

#include <span>
#include <vector>

#include "mginf/dist.hpp"
#include "mginf/parallel.hpp"

namespace mginf {

/// Poisson arrival rate and service law of an M/G/inf system that starts
/// empty.
class QueueParams {
  public:
    QueueParams(double lambda, ServiceModel service);

    double lambda() const noexcept { return lambda_; }
    const ServiceModel& service() const noexcept { return service_; }
    double service_mean() const noexcept { return b_; }
    // Stationary load lambda * b.
    double rho() const noexcept { return lambda_ * b_; }

  private:
    double lambda_;
    ServiceModel service_;
    double b_;
};

double rho_of_t(const QueueParams& params, double t);

// Remaining load rho - rho(t) = lambda * int_t^inf sf, computed without
// cancellation.
double rho_deficit(const QueueParams& params, double t);

/// Poisson(m) mass at k evaluated in log space.
double poisson_pmf(double m, int k);

double pk_transient(const QueueParams& params, int k, double t);
double pk_stationary(const QueueParams& params, int k);

/// Upper summation index for sup_k: ceil(rho + 10 sqrt(rho) + 30).
int sup_truncation(double rho);

/// sup_k |P_k(t) - P_k| over k = 0..sup_truncation(rho).
double phi_exact(const QueueParams& params, double t);

/// 2 rho^[rho] / [rho]! with [.] the floor.
double c_rho(const QueueParams& params);

/// Explicit bound C_rho * lambda * int_t^inf sf(x) dx on phi(t).
double phi_bound_eq1(const QueueParams& params, double t);

struct TransientCurve {
    std::vector<double> times;
    std::vector<double> rho_t;
    std::vector<double> phi;
    std::vector<double> bound_eq1;
};

TransientCurve transient_curve(const QueueParams& params, std::span<const double> times,
                               Execution exec = Execution::parallel);

}  // namespace mginf
