#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "mginf/parallel.hpp"
#include "mginf/transient.hpp"

namespace mginf {

using Engine = std::mt19937_64;

enum class Purpose : std::uint64_t { snapshot = 1, cycle = 2 };

/// Seed of the substream keyed by (seed, purpose, index, salt). Streams for
/// distinct keys are statistically independent, so work items can run in any
/// order or on any thread.
std::uint64_t substream_seed(std::uint64_t seed, Purpose purpose, std::uint64_t index, std::uint64_t salt = 0);
Engine make_stream(std::uint64_t seed, Purpose purpose, std::uint64_t index, std::uint64_t salt = 0);

struct CycleSample {
    double busy_len;
    double idle_len;
    double cycle_len;
};

struct EmpiricalLaw {
    double t = 0.0;
    std::vector<std::uint64_t> counts;  // k = 0..K_max
    std::uint64_t overflow = 0;         // draws above K_max
    std::uint64_t reps = 0;
};

struct EmpiricalPhi {
    double phi;
    // Worst-case standard error sqrt(1 / (4 reps)).
    double standard_error;
};

struct GofResult {
    double statistic;
    int dof;
    double p_value;
};

/// Number in system at time t for one replication started empty: a Poisson
/// number of arrivals placed uniformly on [0,t], each staying for one service
/// draw.
int q_at_time(const QueueParams& params, double t, Engine& rng);

inline constexpr std::uint64_t kMaxCycleEvents = 10'000'000;

/// n independent regeneration cycles; cycle i uses substream (seed, cycle, i).
/// Throws RunawayCycleError if a busy period exceeds kMaxCycleEvents arrivals.
std::vector<CycleSample> run_cycles(const QueueParams& params, std::size_t n, std::uint64_t seed,
                                    Execution exec = Execution::parallel);

EmpiricalLaw empirical_law(const QueueParams& params, double t, std::size_t reps, std::uint64_t seed,
                           Execution exec = Execution::parallel);

/// sup_k |counts[k]/reps - P_k| against the stationary law.
EmpiricalPhi empirical_phi(const QueueParams& params, const EmpiricalLaw& law);
EmpiricalPhi empirical_phi(const QueueParams& params, double t, std::size_t reps, std::uint64_t seed,
                           Execution exec = Execution::parallel);

/// One-sample Kolmogorov-Smirnov statistic sup_x |F_n(x) - cdf(x)|.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Pearson chi-square test of counts over k = 0..K against pmf over the same
/// range; the last bin absorbs the upper tail on both sides. Adjacent bins
/// are pooled until every expected count reaches `min_expected`.
GofResult chi_square_gof(std::span<const std::uint64_t> counts, std::span<const double> pmf,
                         double min_expected = 5.0);

/// Chi-square test of an empirical law against Poisson(m) over bins 0..last_bin.
GofResult poisson_gof(const EmpiricalLaw& law, double m, int last_bin);

}  // namespace mginf
