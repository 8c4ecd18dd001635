#include <benchmark/benchmark.h>

#include "asd/meanfield.hpp"

using namespace asd;

static void BM_PhiExactErg(benchmark::State& state) {
  const auto k = static_cast<std::int32_t>(state.range(0));
  auto s = MeanFieldState::uniform_blocks(1, {0.5, 0.3, 0.2});
  auto kernel = erg_kernel();
  PhiOptions opt;
  opt.mode = PhiMode::exact;
  for (auto _ : state) benchmark::DoNotOptimize(phi_varphi(DegreeVector{k}, 0, s, *kernel, opt));
}
BENCHMARK(BM_PhiExactErg)->Arg(10)->Arg(50);

static void BM_PhiMonteCarloTltm(benchmark::State& state) {
  auto s = MeanFieldState::uniform_blocks(2, {0.2, 0.6, 0.2});
  auto kernel = tltm_kernel(2, 2);
  PhiOptions opt;
  opt.mode = PhiMode::monte_carlo;
  opt.mc_samples = 10'000;
  for (auto _ : state) benchmark::DoNotOptimize(phi_varphi(DegreeVector{20, 6}, 0, s, *kernel, opt));
}
BENCHMARK(BM_PhiMonteCarloTltm)->Unit(benchmark::kMicrosecond);

static void BM_OdeRhs(benchmark::State& state) {
  MeanField mf(regular_statistics(21, {0.4, 0.6}), brca_kernel(std::vector<bool>{true, false}));
  auto s = MeanFieldState::uniform_blocks(2, {0.3, 0.7});
  MeanFieldState ds;
  for (auto _ : state) {
    mf.rhs(s, ds);
    benchmark::DoNotOptimize(ds);
  }
}
BENCHMARK(BM_OdeRhs);

static void BM_IntegrateErg(benchmark::State& state) {
  MeanField mf(regular_statistics(50, {1.0}), erg_kernel());
  auto init = MeanFieldState::uniform_blocks(1, {1.0, 0.0, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(integrate(init, mf, {0.01, 20.0, 0.1}));
}
BENCHMARK(BM_IntegrateErg)->Unit(benchmark::kMillisecond);

static void BM_FindStationaryTltm(benchmark::State& state) {
  MeanField mf(regular_statistics(10, {1.0}), tltm_kernel(2, 2));
  for (auto _ : state) benchmark::DoNotOptimize(find_stationary(mf));
}
BENCHMARK(BM_FindStationaryTltm)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
