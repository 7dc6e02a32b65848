#include <benchmark/benchmark.h>

#include <vector>

#include "varcharts/charts.hpp"
#include "varcharts/process.hpp"

namespace {

using varcharts::ChangeSpec;
using varcharts::ChartConfig;
using varcharts::ChartScheme;
using varcharts::PathGenerator;
using varcharts::ProcessSpec;

std::vector<double> bench_path(int n) {
  const ProcessSpec spec = ProcessSpec::ar1(0.4);
  PathGenerator gen(spec, ChangeSpec::none(), 42, 0);
  std::vector<double> path(n);
  for (double& x : path) x = gen.next();
  return path;
}

void BM_ChartUpdate(benchmark::State& state, ChartScheme scheme) {
  const ProcessSpec spec = ProcessSpec::ar1(0.4);
  ChartConfig config;
  config.scheme = scheme;
  if (varcharts::scheme_uses_reference(scheme)) config.delta_star = 1.5;
  auto chart = varcharts::make_chart(config, spec);
  const auto path = bench_path(2048);
  std::size_t i = 0;
  for (auto _ : state) {
    if (i == path.size()) {
      chart->reset();
      i = 0;
    }
    benchmark::DoNotOptimize(chart->update(path[i++]));
  }
  state.SetItemsProcessed(state.iterations());
}

BENCHMARK_CAPTURE(BM_ChartUpdate, cusum_iid, ChartScheme::kCusumIid);
BENCHMARK_CAPTURE(BM_ChartUpdate, lr, ChartScheme::kLr);
BENCHMARK_CAPTURE(BM_ChartUpdate, sprt, ChartScheme::kSprt);
BENCHMARK_CAPTURE(BM_ChartUpdate, sr_iid, ChartScheme::kSrIid);
BENCHMARK_CAPTURE(BM_ChartUpdate, sr, ChartScheme::kSr);
BENCHMARK_CAPTURE(BM_ChartUpdate, gsprt, ChartScheme::kGsprt);
BENCHMARK_CAPTURE(BM_ChartUpdate, gsr_iid, ChartScheme::kGsrIid);
BENCHMARK_CAPTURE(BM_ChartUpdate, gsr, ChartScheme::kGsr);

// The GLR scan is O(candidates) per step; report cost at several depths.
void BM_GlrUpdateDepth(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const ProcessSpec spec = ProcessSpec::ar1(0.4);
  ChartConfig config;
  config.scheme = ChartScheme::kGlr;
  auto chart = varcharts::make_chart(config, spec);
  const auto path = bench_path(depth);
  for (double x : path) chart->update(x);  // warm to the target depth
  const auto tail = bench_path(256);
  std::size_t i = 0;
  for (auto _ : state) {
    if (i == tail.size()) i = 0;
    benchmark::DoNotOptimize(chart->update(tail[i++]));
  }
  state.SetItemsProcessed(state.iterations());
}

BENCHMARK(BM_GlrUpdateDepth)->Arg(64)->Arg(512)->Arg(4096)->Arg(32768);

void BM_PathGenerator(benchmark::State& state) {
  const ProcessSpec spec = ProcessSpec::ar1(0.4);
  PathGenerator gen(spec, ChangeSpec::none(), 7, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen.next());
  }
  state.SetItemsProcessed(state.iterations());
}

BENCHMARK(BM_PathGenerator);

}  // namespace
