#include <benchmark/benchmark.h>

#include "brine/free_energy.hpp"
#include "brine/lattice.hpp"
#include "brine/salt_entropy.hpp"
#include "brine/variational.hpp"

using namespace brine;

namespace {

ModelParams params(double h, double c, double kappa) {
  return {.J = 0.6, .h = h, .kappa = kappa, .c = c, .d = 2, .bc = Boundary::Plus};
}

void BM_MinimizeG(benchmark::State& state) {
  const auto model = make_onsager_2d(0.6);
  const auto p = params(-0.03, 0.1, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(minimize_g(p, *model));
}
BENCHMARK(BM_MinimizeG);

void BM_BigG(benchmark::State& state) {
  const auto model = make_onsager_2d(0.6);
  const auto p = params(-0.03, 0.1, 1.0);
  double m = -0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(big_g(m, p, *model));
    m = m > 0.9 ? -0.9 : m + 1e-3;
  }
}
BENCHMARK(BM_BigG);

void BM_PhaseBoundaries(benchmark::State& state) {
  const auto model = make_onsager_2d(0.6);
  std::vector<double> grid;
  for (int i = 0; i <= 25; ++i) grid.push_back(0.01 * i);
  for (auto _ : state) benchmark::DoNotOptimize(phase_boundaries(grid, 1.0, *model));
}
BENCHMARK(BM_PhaseBoundaries);

void BM_CountSaltConfigs(benchmark::State& state) {
  const long long L = state.range(0), n = L * L;
  for (auto _ : state) benchmark::DoNotOptimize(count_salt_configs(n, n / 2, n / 5, (7 * n) / 50));
}
BENCHMARK(BM_CountSaltConfigs)->Arg(20)->Arg(100);

void BM_Sweep(benchmark::State& state) {
  ChainConfig cfg;
  cfg.params = params(-0.05, 0.1, 1.0);
  cfg.L = static_cast<int>(state.range(0));
  CounterRng rng(1);
  auto lattice = init_state(cfg, rng);
  const long long n = lattice.sites();
  for (auto _ : state) {
    for (long long x = 0; x < n; ++x) spin_flip_step(lattice, x, rng);
    for (long long k = 0; k < n; ++k)
      salt_swap_step(lattice, lattice.random_salt_site(rng), lattice.random_empty_site(rng), rng);
  }
  state.SetItemsProcessed(state.iterations() * 2 * n);
}
BENCHMARK(BM_Sweep)->Arg(16)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
