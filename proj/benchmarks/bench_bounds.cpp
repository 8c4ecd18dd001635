#include <benchmark/benchmark.h>

#include "asd/bounds.hpp"

using namespace asd;

static void BM_TreeSample(benchmark::State& state) {
  TreeSampler sampler(regular_statistics(3, {1.0}));
  Rng rng(1);
  const double t = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(t, rng));
}
BENCHMARK(BM_TreeSample)->Arg(5)->Arg(10)->Arg(20);

static void BM_EstimateTails(benchmark::State& state) {
  auto stats = regular_statistics(3, {1.0});
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_tails(stats, 1.0, 10'000, ++seed));
}
BENCHMARK(BM_EstimateTails)->Unit(benchmark::kMillisecond);

static void BM_TopologicalBoundSearch(benchmark::State& state) {
  auto stats = regular_statistics(3, {0.5, 0.5});
  auto tails = estimate_tails(stats, 1.0, 10'000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(topological_bound(stats, 1e5, tails));
}
BENCHMARK(BM_TopologicalBoundSearch)->Unit(benchmark::kMicrosecond);

static void BM_CouplingTrace(benchmark::State& state) {
  auto g = sample_regular(3, static_cast<NodeId>(state.range(0)), 4);
  CouplingRunner runner(g);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(runner.run(1.0, rng));
}
BENCHMARK(BM_CouplingTrace)->Arg(1'000)->Arg(100'000);

BENCHMARK_MAIN();
