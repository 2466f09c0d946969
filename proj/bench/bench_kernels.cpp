#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "letf/expansion.hpp"
#include "letf/oracles.hpp"

using namespace letf;

namespace {

const ModelSpec kSabr = ModelSpec::sabr({0.5, -0.5, 0.0});
const MarketPoint kPoint{0.0, 0.5, 0.0, -1.5, 0.0, 0.0, -2.0};

McConfig mc_config(benchmark::State& state) {
    McConfig c;
    c.paths = static_cast<std::uint64_t>(state.range(0));
    c.steps_per_year = 250;
    return c;
}

std::vector<double> strikes(int n) {
    std::vector<double> k;
    for (int i = 0; i < n; ++i) k.push_back(-0.6 + 1.2 * i / (n - 1));
    return k;
}

void BM_TerminalSerial(benchmark::State& state) {
    const auto cfg = mc_config(state);
    for (auto _ : state) benchmark::DoNotOptimize(mc_simulate_terminal_serial(kSabr, kPoint, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TerminalParallel(benchmark::State& state) {
    const auto cfg = mc_config(state);
    for (auto _ : state) benchmark::DoNotOptimize(mc_simulate_terminal(kSabr, kPoint, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_StrikeSweep(benchmark::State& state) {
    McConfig cfg;
    cfg.paths = 200'000;
    cfg.steps_per_year = 250;
    const auto sample = mc_simulate_terminal(kSabr, kPoint, cfg);
    const auto k = strikes(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mc_prices(sample, kPoint.beta, 0.0, k, Payoff::Put));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EngineSeries(benchmark::State& state) {
    const auto table = kSabr.taylor_table(0.0, -1.5, 3);
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(iv_series_engine(table, kPoint.beta, order));
}

void BM_FourierSmile(benchmark::State& state) {
    const HestonParams p{1.15, 0.04, 0.2, -0.4};
    MarketPoint pt = kPoint;
    pt.y = std::log(0.04);
    const auto k = strikes(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fourier_implied_smile(p, pt, k, FourierConfig{}));
}

}  // namespace

BENCHMARK(BM_TerminalSerial)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TerminalParallel)->Arg(100'000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StrikeSweep)->Arg(25)->Arg(101)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EngineSeries)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FourierSmile)->Arg(25)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
