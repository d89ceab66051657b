#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "brine/params.hpp"
#include "brine/rng.hpp"

namespace brine {

struct ChainConfig {
  ModelParams params;
  int L = 8;
  std::uint64_t seed = 1;
  long long sweeps = 1000;
  long long burnIn = 200;
  long long thinning = 10;
  bool recordJoint = false;    ///< collect the (M, Q) histogram
  bool recordTrace = false;    ///< keep every recorded (sweep, M, Q)
  bool perturbAcceptance = false;  ///< negative-control hook: wrong salt sign in spin flips
};

/// Throws ValidationError unless sweeps > burnIn >= 0, thinning >= 1, L >= 1.
ChainConfig validate(const ChainConfig& config);

/// Spin and salt configuration on an L^d box with a frozen boundary shell.
/// Totals and the reduced energy βH are cached and updated incrementally.
class LatticeState {
 public:
  LatticeState(const ModelParams& params, int L);

  const ModelParams& params() const noexcept { return params_; }
  int side() const noexcept { return L_; }
  int dimension() const noexcept { return params_.d; }
  long long sites() const noexcept { return static_cast<long long>(spins_.size()); }

  int spin(long long site) const noexcept { return spins_[site]; }
  bool has_salt(long long site) const noexcept { return salt_[site] != 0; }

  long long magnetization() const noexcept { return M_; }
  long long salt_total() const noexcept { return static_cast<long long>(saltSites_.size()); }
  long long salt_on_plus() const noexcept { return Q_; }
  long long plus_count() const noexcept { return (sites() + M_) / 2; }
  double energy() const noexcept { return energy_; }

  /// Neighbour indices of a site; -1 marks the boundary shell.
  const int* neighbors(long long site) const noexcept { return &neighbors_[site * 2 * params_.d]; }

  /// Change of βH if the spin at `site` were flipped.
  double flip_delta(long long site) const noexcept;
  /// Change of βH if the salt at `from` moved to the empty site `to`.
  double move_delta(long long from, long long to) const noexcept;

  void flip(long long site, double delta) noexcept;
  void move_salt(long long from, long long to, double delta) noexcept;

  /// Places salt on the given sites (replacing any present) and rebuilds caches.
  void set_salt(const std::vector<long long>& sites);
  void set_spin(long long site, int value);

  /// βH evaluated from scratch.
  double recompute_energy() const noexcept;
  /// True if cached totals match the arrays and the energy agrees to `relTol`.
  bool caches_consistent(double relTol = 1e-8) const;

  long long random_salt_site(CounterRng& rng) const noexcept {
    return saltSites_[rng.below(saltSites_.size())];
  }
  long long random_empty_site(CounterRng& rng) const noexcept {
    return emptySites_[rng.below(emptySites_.size())];
  }

  bool operator==(const LatticeState& other) const noexcept {
    return spins_ == other.spins_ && salt_ == other.salt_;
  }

 private:
  void rebuild_caches();

  ModelParams params_;
  int L_;
  std::vector<std::int8_t> spins_;
  std::vector<std::uint8_t> salt_;
  std::vector<int> neighbors_;
  std::vector<long long> saltSites_;
  std::vector<long long> emptySites_;
  std::vector<long long> slot_;  // position of a site inside saltSites_ or emptySites_
  long long M_ = 0;
  long long Q_ = 0;
  double energy_ = 0.0;
};

/// Spins at the boundary value; ⌊cL^d⌋ salt particles placed uniformly
/// without replacement using `rng`.
LatticeState init_state(const ChainConfig& config, CounterRng& rng);

/// Metropolis update of one spin. With `perturb` set, the salt term enters
/// with the wrong sign (test hook).
bool spin_flip_step(LatticeState& state, long long site, CounterRng& rng, bool perturb = false);

enum class SwapResult { Accepted, Rejected, Invalid };

/// Metropolis move of a salt particle from `from` to the empty site `to`.
/// Conserves the salt count.
SwapResult salt_swap_step(LatticeState& state, long long from, long long to, CounterRng& rng);

struct Estimate {
  double mean = 0.0;
  double stdErr = 0.0;  ///< blocked standard error; NaN with fewer than two blocks
};

struct TraceRecord {
  long long sweep;
  long long M;
  long long Q;
};

struct SampleStats {
  long long samples = 0;
  long long sites = 0;
  long long saltCount = 0;
  double concentration = 0.0;  ///< N_L / L^d
  Estimate meanM;              ///< M_L / L^d
  Estimate meanQ;              ///< Q_L / L^d
  Estimate plusFraction;       ///< (L^d + M_L) / (2 L^d)
  Estimate occPlus;            ///< salt frequency on plus spins
  Estimate occMinus;           ///< salt frequency on minus spins
  Estimate oddsRatio;          ///< odds(occPlus) / odds(occMinus)
  double varM = 0.0;           ///< sample variance of M_L / L^d
  std::vector<long long> histM;  ///< counts indexed by (M_L + L^d)/2
  std::map<std::pair<long long, long long>, long long> jointMQ;
  std::vector<TraceRecord> trace;
  long long flipProposals = 0;
  long long flipAccepted = 0;
  long long swapProposals = 0;
  long long swapAccepted = 0;
  long long swapInvalid = 0;
};

using SampleObserver = std::function<void(const LatticeState&, long long sweep)>;

/// One chain: full spin sweeps alternating with L^d salt-swap proposals;
/// samples every `thinning` sweeps after burn-in. `stream` selects the RNG stream.
SampleStats run_chain(const ChainConfig& config, std::uint64_t stream = 0,
                      const SampleObserver& observer = {});

/// Independent chains on streams 0..chains-1, folded in chain order.
SampleStats run_chains(const ChainConfig& config, int chains, unsigned threads);

}  // namespace brine
