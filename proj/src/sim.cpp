#include "mginf/sim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "mginf/errors.hpp"

namespace mginf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CycleSample one_cycle(const QueueParams& params, std::uint64_t seed, std::uint64_t index) {
    Engine rng = make_stream(seed, Purpose::cycle, index);
    std::exponential_distribution<double> gap(params.lambda());
    // Arrival to an empty system at time 0; the system empties at the latest
    // departure epoch unless another arrival comes first.
    double last_departure = sample(params.service(), rng);
    double clock = 0.0;
    std::uint64_t events = 1;
    for (;;) {
        clock += gap(rng);
        if (clock > last_departure) {
            break;
        }
        last_departure = std::max(last_departure, clock + sample(params.service(), rng));
        if (++events > kMaxCycleEvents) {
            throw RunawayCycleError("busy period of cycle " + std::to_string(index) + " exceeded " +
                                    std::to_string(kMaxCycleEvents) + " arrivals (elapsed " +
                                    std::to_string(clock) + ")");
        }
    }
    // Memorylessness: the overshoot of the next arrival past the last
    // departure is the Exp(lambda) idle period.
    const double busy = last_departure;
    const double idle = clock - last_departure;
    return {busy, idle, busy + idle};
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, Purpose purpose, std::uint64_t index, std::uint64_t salt) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    h = splitmix64(h ^ salt);
    return splitmix64(h ^ index);
}

Engine make_stream(std::uint64_t seed, Purpose purpose, std::uint64_t index, std::uint64_t salt) {
    return Engine(substream_seed(seed, purpose, index, salt));
}

int q_at_time(const QueueParams& params, double t, Engine& rng) {
    if (!(t >= 0.0)) {
        throw DomainError("q_at_time needs t >= 0");
    }
    if (t == 0.0) {
        return 0;
    }
    std::poisson_distribution<int> arrivals(params.lambda() * t);
    const int count = arrivals(rng);
    int present = 0;
    for (int i = 0; i < count; ++i) {
        const double epoch = t * std::generate_canonical<double, 53>(rng);
        if (epoch + sample(params.service(), rng) > t) {
            ++present;
        }
    }
    return present;
}

std::vector<CycleSample> run_cycles(const QueueParams& params, std::size_t n, std::uint64_t seed, Execution exec) {
    if (n == 0) {
        throw ConfigError("run_cycles needs n >= 1");
    }
    std::vector<CycleSample> out(n);
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = one_cycle(params, seed, i);
        }
        return out;
    }
    std::atomic<bool> failed{false};
    std::string failure;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        if (failed.load(std::memory_order_relaxed)) {
            continue;
        }
        try {
            out[static_cast<std::size_t>(i)] = one_cycle(params, seed, static_cast<std::uint64_t>(i));
        } catch (const RunawayCycleError& e) {
#pragma omp critical(mginf_cycle_failure)
            {
                if (!failed.exchange(true)) {
                    failure = e.what();
                }
            }
        }
    }
    if (failed) {
        throw RunawayCycleError(failure);
    }
    return out;
}

EmpiricalLaw empirical_law(const QueueParams& params, double t, std::size_t reps, std::uint64_t seed,
                           Execution exec) {
    if (reps == 0) {
        throw ConfigError("empirical law needs at least one replication");
    }
    if (!(t >= 0.0)) {
        throw DomainError("empirical law needs t >= 0");
    }
    const std::uint64_t salt = std::bit_cast<std::uint64_t>(t);
    std::vector<int> q(reps);
    auto replicate = [&](std::size_t i) {
        Engine rng = make_stream(seed, Purpose::snapshot, i, salt);
        q[i] = q_at_time(params, t, rng);
    };
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < reps; ++i) {
            replicate(i);
        }
    } else {
        const auto count = static_cast<std::ptrdiff_t>(reps);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            replicate(static_cast<std::size_t>(i));
        }
    }
    EmpiricalLaw law;
    law.t = t;
    law.reps = reps;
    law.counts.assign(static_cast<std::size_t>(sup_truncation(params.rho())) + 1, 0);
    for (int k : q) {
        if (static_cast<std::size_t>(k) < law.counts.size()) {
            ++law.counts[static_cast<std::size_t>(k)];
        } else {
            ++law.overflow;
        }
    }
    return law;
}

EmpiricalPhi empirical_phi(const QueueParams& params, const EmpiricalLaw& law) {
    const double reps = static_cast<double>(law.reps);
    double sup = 0.0;
    for (std::size_t k = 0; k < law.counts.size(); ++k) {
        const double freq = static_cast<double>(law.counts[k]) / reps;
        sup = std::max(sup, std::abs(freq - pk_stationary(params, static_cast<int>(k))));
    }
    return {sup, std::sqrt(1.0 / (4.0 * reps))};
}

EmpiricalPhi empirical_phi(const QueueParams& params, double t, std::size_t reps, std::uint64_t seed,
                           Execution exec) {
    return empirical_phi(params, empirical_law(params, t, reps, seed, exec));
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) {
        throw ConfigError("KS statistic needs at least one sample");
    }
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

GofResult chi_square_gof(std::span<const std::uint64_t> counts, std::span<const double> pmf, double min_expected) {
    if (counts.size() != pmf.size() || counts.empty()) {
        throw ConfigError("chi-square test needs matching, nonempty count and pmf vectors");
    }
    const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
    std::vector<double> p(pmf.begin(), pmf.end());
    const double head = std::accumulate(p.begin(), p.end() - 1, 0.0);
    p.back() = std::max(0.0, 1.0 - head);

    std::vector<double> obs, expd;
    double o = 0.0, e = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        o += static_cast<double>(counts[k]);
        e += n * p[k];
        if (e >= min_expected) {
            obs.push_back(o);
            expd.push_back(e);
            o = e = 0.0;
        }
    }
    if (e > 0.0 || o > 0.0) {
        if (expd.empty()) {
            obs.push_back(o);
            expd.push_back(e);
        } else {
            obs.back() += o;
            expd.back() += e;
        }
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double diff = obs[i] - expd[i];
        stat += diff * diff / expd[i];
    }
    const int dof = static_cast<int>(obs.size()) - 1;
    double p_value = 1.0;
    if (dof > 0) {
        boost::math::chi_squared dist(dof);
        p_value = boost::math::cdf(boost::math::complement(dist, stat));
    }
    return {stat, dof, p_value};
}

GofResult poisson_gof(const EmpiricalLaw& law, double m, int last_bin) {
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(last_bin) + 1, 0);
    std::vector<double> pmf(counts.size());
    for (std::size_t k = 0; k < law.counts.size(); ++k) {
        counts[std::min(k, counts.size() - 1)] += law.counts[k];
    }
    counts.back() += law.overflow;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        pmf[k] = poisson_pmf(m, static_cast<int>(k));
    }
    return chi_square_gof(counts, pmf);
}

}  // namespace mginf
