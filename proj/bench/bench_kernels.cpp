// Serial reference kernels against their OpenMP counterparts. The second
// argument of each benchmark selects the kernel: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "mginf/busy.hpp"
#include "mginf/grid.hpp"
#include "mginf/sim.hpp"
#include "mginf/transient.hpp"

using namespace mginf;

namespace {

Execution exec_of(const benchmark::State& state) {
    return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) {
    state.SetLabel(state.range(1) == 0 ? "serial" : "omp");
}

void BM_Convolve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const double h = 0.01;
    std::vector<double> f(n), g(n), out(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = std::exp(-h * i);
        g[i] = 1.0 / (1.0 + h * i);
    }
    const bool serial = state.range(1) == 0;
    for (auto _ : state) {
        if (serial) {
            kernels::convolve_serial(f.data(), g.data(), out.data(), n, h);
        } else {
            kernels::convolve_omp(f.data(), g.data(), out.data(), n, h);
        }
        benchmark::DoNotOptimize(out.data());
    }
    label(state);
}
BENCHMARK(BM_Convolve)->ArgsProduct({{2000, 8000, 20000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_StadjeTable(benchmark::State& state) {
    const QueueParams p(1.0, ServiceModel::exponential(1.0));
    const double t_max = 40.0;
    const double h = t_max / static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(stadje_tail(p, h, t_max, 1e-4, exec_of(state)));
    }
    label(state);
}
BENCHMARK(BM_StadjeTable)->ArgsProduct({{2000, 8000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_TransientCurve(benchmark::State& state) {
    const QueueParams p(2.0, ServiceModel::hyperexponential({0.5, 0.5}, {1.0, 2.0}));
    std::vector<double> times(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < times.size(); ++i) {
        times[i] = 20.0 * p.service_mean() * i / static_cast<double>(times.size());
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(transient_curve(p, times, exec_of(state)));
    }
    label(state);
}
BENCHMARK(BM_TransientCurve)->ArgsProduct({{1000, 10000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_RunCycles(benchmark::State& state) {
    const QueueParams p(1.0, ServiceModel::lomax(3.0, 1.0));
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_cycles(p, n, 1, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
    label(state);
}
BENCHMARK(BM_RunCycles)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_EmpiricalLaw(benchmark::State& state) {
    const QueueParams p(1.0, ServiceModel::exponential(1.0));
    const auto reps = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(empirical_law(p, 2.0, reps, 1, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
    label(state);
}
BENCHMARK(BM_EmpiricalLaw)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
