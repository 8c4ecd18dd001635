#include <benchmark/benchmark.h>

#include "asd/graph.hpp"

using namespace asd;

static void BM_SampleRegular(benchmark::State& state) {
  const auto n = static_cast<NodeId>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_regular(10, n, ++seed));
  state.SetItemsProcessed(state.iterations() * n * 10);
}
BENCHMARK(BM_SampleRegular)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_SampleCbm(benchmark::State& state) {
  const auto n = static_cast<NodeId>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_cbm({n / 2, n - n / 2}, {{20, 6}, {5, 20}}, n, ++seed));
  state.SetItemsProcessed(state.iterations() * n * 25);
}
BENCHMARK(BM_SampleCbm)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_ExtractStatistics(benchmark::State& state) {
  auto g = sample_cbm({50'000, 50'000}, {{20, 6}, {5, 20}}, 100'000, 1);
  for (auto _ : state) benchmark::DoNotOptimize(extract_statistics(g));
}
BENCHMARK(BM_ExtractStatistics)->Unit(benchmark::kMillisecond);

static void BM_ConfigurationModelFromStatistics(benchmark::State& state) {
  auto stats = regular_statistics(21, {0.4, 0.6}, LabelSet{"coordinating", "anti"});
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_configuration_model(stats, 100'000, ++seed));
}
BENCHMARK(BM_ConfigurationModelFromStatistics)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
