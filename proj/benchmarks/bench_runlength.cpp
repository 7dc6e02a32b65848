#include <benchmark/benchmark.h>

#include "varcharts/runlength.hpp"

namespace {

using namespace varcharts;

ChartConfig armed_sprt() {
  ChartConfig config;
  config.scheme = ChartScheme::kSprt;
  config.delta_star = 1.5;
  config.limit = 8.0;
  return config;
}

void BM_FirstPassage(benchmark::State& state) {
  const ProcessSpec spec = ProcessSpec::ar1(0.4);
  const ChartConfig config = armed_sprt();
  std::uint64_t rep = 0;
  std::int64_t steps = 0;
  for (auto _ : state) {
    const auto sample =
        first_passage(config, spec, ChangeSpec::none(), 9, rep++, 50000);
    steps += sample.n;
    benchmark::DoNotOptimize(sample.n);
  }
  state.SetItemsProcessed(steps);  // chart updates, the unit of work
}

BENCHMARK(BM_FirstPassage)->Unit(benchmark::kMicrosecond);

void BM_EstimateArl(benchmark::State& state) {
  const ProcessSpec spec = ProcessSpec::ar1(0.4);
  const ChartConfig config = armed_sprt();
  const SimOptions options{static_cast<std::int64_t>(state.range(0)), 11, 50000,
                           static_cast<int>(state.range(1))};
  for (auto _ : state) {
    const auto est = estimate_arl(config, spec, ChangeSpec::none(), options);
    benchmark::DoNotOptimize(est.mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_EstimateArl)
    ->Args({2000, 1})
    ->Args({2000, 2})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
