#include <chrono>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "brine/errors.hpp"
#include "brine/free_energy.hpp"
#include "brine/lattice.hpp"
#include "brine/variational.hpp"

using namespace brine;

namespace {

ChainConfig config(double J, double h, double kappa, double c, int L, std::uint64_t seed = 7) {
  ChainConfig cfg;
  cfg.params = {.J = J, .h = h, .kappa = kappa, .c = c, .d = 2, .bc = Boundary::Plus};
  cfg.L = L;
  cfg.seed = seed;
  return cfg;
}

long long site(int L, int x, int y) { return static_cast<long long>(y) * L + x; }

}  // namespace

TEST(InitState, Examples) {
  auto cfg = config(0.4, 0.0, 1.0, 0.0, 6);
  CounterRng rng(cfg.seed);
  auto empty = init_state(cfg, rng);
  EXPECT_EQ(empty.salt_total(), 0);
  EXPECT_EQ(empty.salt_on_plus(), 0);

  cfg.params.c = 0.3;
  CounterRng a(cfg.seed), b(cfg.seed);
  const auto s1 = init_state(cfg, a);
  const auto s2 = init_state(cfg, b);
  EXPECT_EQ(s1.magnetization(), 36);
  EXPECT_EQ(s1.salt_total(), 10);
  EXPECT_EQ(s1.salt_on_plus(), 10);
  EXPECT_TRUE(s1 == s2);
  EXPECT_TRUE(s1.caches_consistent());

  cfg.params.bc = Boundary::Minus;
  CounterRng c(cfg.seed);
  const auto minus = init_state(cfg, c);
  EXPECT_EQ(minus.magnetization(), -36);
  EXPECT_EQ(minus.salt_on_plus(), 0);
}

TEST(ChainConfigValidation, RejectsBadSchedules) {
  auto cfg = config(0.4, 0.0, 1.0, 0.1, 4);
  cfg.burnIn = cfg.sweeps;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = config(0.4, 0.0, 1.0, 0.1, 4);
  cfg.thinning = 0;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = config(0.4, 0.0, 1.0, 0.1, 4);
  cfg.burnIn = -1;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = config(0.4, 0.0, 1.0, 1.0, 4);
  EXPECT_THROW(validate(cfg), ValidationError);
}

TEST(SpinFlip, FlatMeasureAlwaysAccepts) {
  auto cfg = config(0.0, 0.0, 0.0, 0.2, 5);
  CounterRng rng(1);
  auto state = init_state(cfg, rng);
  for (int rep = 0; rep < 20; ++rep)
    for (long long x = 0; x < state.sites(); ++x) EXPECT_TRUE(spin_flip_step(state, x, rng));
}

TEST(SpinFlip, IsolatedMinusSpinFlipsBack) {
  auto cfg = config(0.5, 0.0, 0.0, 0.0, 5);
  CounterRng rng(1);
  auto state = init_state(cfg, rng);
  const long long x = site(5, 2, 2);
  state.set_spin(x, -1);
  EXPECT_DOUBLE_EQ(state.flip_delta(x), -4 * 2 * 0.5);
  for (int rep = 0; rep < 50; ++rep) {
    state.set_spin(x, -1);
    EXPECT_TRUE(spin_flip_step(state, x, rng));
    EXPECT_EQ(state.spin(x), 1);
  }
}

TEST(SpinFlip, DeltaMatchesRecomputation) {
  auto cfg = config(0.45, -0.13, 1.7, 0.3, 6);
  CounterRng rng(11);
  auto state = init_state(cfg, rng);
  for (int i = 0; i < 2000; ++i) {
    const long long x = static_cast<long long>(rng.below(state.sites()));
    const double before = state.recompute_energy();
    const double delta = state.flip_delta(x);
    state.flip(x, delta);
    EXPECT_NEAR(state.recompute_energy() - before, delta, 1e-9);
    if (i % 3 == 0 && state.salt_total() > 0) {
      const long long from = state.random_salt_site(rng);
      const long long to = state.random_empty_site(rng);
      const double before2 = state.recompute_energy();
      const double d2 = state.move_delta(from, to);
      state.move_salt(from, to, d2);
      EXPECT_NEAR(state.recompute_energy() - before2, d2, 1e-9);
    }
  }
  EXPECT_TRUE(state.caches_consistent());
}

TEST(SaltSwap, Examples) {
  auto cfg = config(0.4, 0.0, 0.0, 0.3, 5);
  CounterRng rng(2);
  auto state = init_state(cfg, rng);
  for (long long x = 0; x < state.sites(); x += 2) state.set_spin(x, -1);
  for (int i = 0; i < 500; ++i) {
    const long long from = state.random_salt_site(rng);
    const long long to = state.random_empty_site(rng);
    EXPECT_EQ(salt_swap_step(state, from, to, rng), SwapResult::Accepted);
  }

  auto cfg2 = config(0.4, 0.0, 2.5, 0.0, 5);
  CounterRng rng2(3);
  auto s = init_state(cfg2, rng2);
  const long long minusSite = site(5, 1, 1), plusSite = site(5, 3, 3);
  s.set_spin(minusSite, -1);
  s.set_salt({minusSite});
  EXPECT_DOUBLE_EQ(s.move_delta(minusSite, plusSite), -2.5);
  EXPECT_EQ(salt_swap_step(s, minusSite, plusSite, rng2), SwapResult::Accepted);
  EXPECT_TRUE(s.has_salt(plusSite));
  EXPECT_FALSE(s.has_salt(minusSite));
  EXPECT_EQ(s.salt_on_plus(), 1);

  // preconditions violated: counted, nothing changes
  EXPECT_EQ(salt_swap_step(s, minusSite, plusSite, rng2), SwapResult::Invalid);
  EXPECT_EQ(salt_swap_step(s, plusSite, plusSite, rng2), SwapResult::Invalid);
  EXPECT_EQ(s.salt_total(), 1);
}

TEST(RunChain, ConservesSaltAndKeepsCaches) {
  auto cfg = config(0.5, -0.02, 1.5, 0.17, 12);
  cfg.sweeps = 3000;
  cfg.burnIn = 0;
  cfg.thinning = 1;
  const long long N = salt_count(cfg.params.c, 144);
  bool ok = true;
  const auto stats = run_chain(cfg, 0, [&](const LatticeState& s, long long sweep) {
    ok = ok && s.salt_total() == N;
    ok = ok && s.salt_on_plus() >= 0 && s.salt_on_plus() <= std::min(N, s.plus_count());
    if (sweep % 1000 == 0) ok = ok && s.caches_consistent(1e-8);
  });
  EXPECT_TRUE(ok);
  EXPECT_EQ(stats.saltCount, N);
  EXPECT_EQ(stats.samples, 3000);
}

TEST(RunChain, PerSampleIdentity) {
  auto cfg = config(0.4, 0.0, 1.0, 0.2, 10);
  cfg.sweeps = 2000;
  cfg.thinning = 1;
  cfg.recordTrace = true;
  const auto stats = run_chain(cfg);
  const double n = static_cast<double>(stats.sites);
  for (const auto& r : stats.trace) {
    const double plus = (n + r.M) / 2, minus = n - plus;
    const double occP = plus > 0 ? r.Q / plus : 0.0;
    const double occM = minus > 0 ? (stats.saltCount - r.Q) / minus : 0.0;
    EXPECT_NEAR(occP * plus / n + occM * minus / n, stats.concentration, 1e-12);
  }
  EXPECT_DOUBLE_EQ(stats.concentration, 20.0 / 100.0);
}

TEST(RunChain, NoRepulsionDecouplesSalt) {
  auto cfg = config(0.3, 0.0, 0.0, 0.2, 16);
  cfg.sweeps = 6000;
  cfg.burnIn = 500;
  cfg.thinning = 2;
  const auto s = run_chain(cfg);
  // N = 51 on 256 sites, so the realised concentration is 51/256
  EXPECT_DOUBLE_EQ(s.concentration, 51.0 / 256.0);
  EXPECT_NEAR(s.occPlus.mean, s.concentration, 3 * s.occPlus.stdErr);
  EXPECT_NEAR(s.occMinus.mean, s.concentration, 3 * s.occMinus.stdErr);
}

TEST(RunChain, Reproducible) {
  auto cfg = config(0.5, -0.05, 1.0, 0.1, 8);
  cfg.sweeps = 800;
  cfg.thinning = 1;
  cfg.recordJoint = true;
  const auto a = run_chain(cfg), b = run_chain(cfg);
  EXPECT_EQ(a.meanM.mean, b.meanM.mean);
  EXPECT_EQ(a.meanM.stdErr, b.meanM.stdErr);
  EXPECT_EQ(a.oddsRatio.mean, b.oddsRatio.mean);
  EXPECT_EQ(a.histM, b.histM);
  EXPECT_EQ(a.jointMQ, b.jointMQ);
  EXPECT_EQ(a.flipAccepted, b.flipAccepted);
  const auto p1 = run_chains(cfg, 3, 1), p3 = run_chains(cfg, 3, 3);
  EXPECT_EQ(p1.meanM.mean, p3.meanM.mean);
  EXPECT_EQ(p1.occPlus.stdErr, p3.occPlus.stdErr);
  EXPECT_EQ(p1.histM, p3.histM);
  cfg.seed = 8;
  EXPECT_NE(run_chain(cfg).meanM.mean, a.meanM.mean);
}

TEST(RunChain, MagnetizationConcentratesWithSize) {
  auto small = config(0.6, 0.1, 1.0, 0.1, 16);
  small.sweeps = 4000;
  small.burnIn = 500;
  small.thinning = 2;
  auto big = small;
  big.L = 32;
  EXPECT_LT(run_chain(big).varM, run_chain(small).varM);
}

TEST(RunChain, LiquidRegionStaysAboveSpontaneousMagnetization) {
  const auto model = make_onsager_2d(0.6);
  const std::vector<double> grid{0.1};
  const double hPlus = phase_boundaries(grid, 1.0, *model).rows[0].hPlus;
  auto cfg = config(0.6, hPlus + 0.3, 1.0, 0.1, 24);
  cfg.sweeps = 3000;
  cfg.burnIn = 500;
  const auto s = run_chain(cfg);
  EXPECT_GE(s.meanM.mean, model->spontaneous_m() - 3 * s.meanM.stdErr);
}

// Salt indicators on a 2x2 window, given the window is all plus, are uncorrelated.
TEST(RunChain, WindowSaltIsProductForm) {
  const int L = 32;
  auto cfg = config(0.6, 0.1, 1.0, 0.1, L, 21);
  cfg.sweeps = 30000;
  cfg.burnIn = 1000;
  cfg.thinning = 1;
  const std::array<long long, 4> window{site(L, 15, 15), site(L, 16, 15), site(L, 15, 16), site(L, 16, 16)};
  std::vector<std::array<int, 4>> draws;
  run_chain(cfg, 0, [&](const LatticeState& s, long long) {
    for (long long x : window)
      if (s.spin(x) != 1) return;
    draws.push_back({s.has_salt(window[0]), s.has_salt(window[1]), s.has_salt(window[2]), s.has_salt(window[3])});
  });
  ASSERT_GT(draws.size(), 20000u);
  const std::size_t blocks = 25, size = draws.size() / blocks;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      std::vector<double> cov(blocks);
      for (std::size_t k = 0; k < blocks; ++k) {
        double sa = 0, sb = 0, sab = 0;
        for (std::size_t i = k * size; i < (k + 1) * size; ++i) {
          sa += draws[i][a];
          sb += draws[i][b];
          sab += draws[i][a] * draws[i][b];
        }
        cov[k] = sab / size - (sa / size) * (sb / size);
      }
      double mean = 0, var = 0;
      for (double v : cov) mean += v / blocks;
      for (double v : cov) var += (v - mean) * (v - mean) / (blocks - 1);
      EXPECT_LE(std::abs(mean), 3 * std::sqrt(var / blocks)) << a << b;
    }
}
