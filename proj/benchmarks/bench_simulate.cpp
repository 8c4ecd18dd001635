#include <benchmark/benchmark.h>

#include "asd/simulate.hpp"

using namespace asd;

namespace {

void run_kernel(benchmark::State& state, const LabeledGraph& g, const UpdateKernel& k, int fill) {
  SimConfig cfg;
  cfg.horizon = 1.0;
  cfg.dt = 0.1;
  cfg.threads = 1;
  std::vector<int> init(static_cast<std::size_t>(g.n()), fill);
  std::int64_t updates = 0;
  for (auto _ : state) {
    auto tr = run_asd(g, k, init, cfg, static_cast<std::uint64_t>(updates));
    updates += tr.updates;
  }
  state.SetItemsProcessed(updates);
}

}  // namespace

static void BM_RunAsdTltm(benchmark::State& state) {
  auto g = sample_regular(static_cast<int>(state.range(0)), 100'000, 1);
  run_kernel(state, g, *tltm_kernel(2, 2), 0);
}
BENCHMARK(BM_RunAsdTltm)->Arg(3)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_RunAsdErg(benchmark::State& state) {
  auto g = sample_regular(static_cast<int>(state.range(0)), 100'000, 1);
  run_kernel(state, g, *erg_kernel(), 0);
}
BENCHMARK(BM_RunAsdErg)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_ExactTransient(benchmark::State& state) {
  auto g = sample_regular(2, static_cast<NodeId>(state.range(0)), 3);
  auto k = tltm_kernel(1, 1);
  std::vector<std::vector<double>> init(static_cast<std::size_t>(g.n()), {0.3, 0.4, 0.3});
  for (auto _ : state) benchmark::DoNotOptimize(exact_transient(g, *k, init, 1.0));
}
BENCHMARK(BM_ExactTransient)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_ExploreNeighborhood(benchmark::State& state) {
  auto g = sample_regular(3, 100'000, 5);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(explore_relevant_neighborhood(g, 0, 1.0, ++seed));
}
BENCHMARK(BM_ExploreNeighborhood);

BENCHMARK_MAIN();
