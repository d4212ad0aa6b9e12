// Serial reference vs OpenMP for the two parallel kernels: whole-run batches
// (a seed sweep of the Dryden scenario) and the derivative L1 integral.
#include "hgdo/batch.hpp"
#include "hgdo/disturbance.hpp"
#include "hgdo/scenario_config.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

std::vector<hgdo::sim::ScenarioConfig> seed_sweep(int n) {
    auto base = hgdo::sim::load_scenario(HGDO_SOURCE_DIR "/configs/lemniscate_dryden.json");
    base.duration = 5.0;
    std::vector<hgdo::sim::ScenarioConfig> out(n, base);
    for (int i = 0; i < n; ++i) out[i].seed = static_cast<std::uint64_t>(i + 1);
    return out;
}

void BM_BatchSerial(benchmark::State& state) {
    const auto cfgs = seed_sweep(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hgdo::sim::run_batch_serial(cfgs));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchParallel(benchmark::State& state) {
    const auto cfgs = seed_sweep(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hgdo::sim::run_batch(cfgs));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

const hgdo::dist::Signal kComposite = hgdo::dist::Signal::composite();

void BM_DerivativeL1Serial(benchmark::State& state) {
    const double dt = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hgdo::dist::derivative_l1_serial(kComposite, 40.0, dt));
}

void BM_DerivativeL1Parallel(benchmark::State& state) {
    const double dt = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hgdo::dist::derivative_l1(kComposite, 40.0, dt));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
// Argument is grid points per second.
BENCHMARK(BM_DerivativeL1Serial)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DerivativeL1Parallel)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
