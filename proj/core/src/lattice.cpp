#include "brine/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <fmt/format.h>

#include "brine/errors.hpp"
#include "brine/parallel.hpp"

namespace brine {

ChainConfig validate(const ChainConfig& config) {
  validate(config.params);
  if (config.L < 1) throw ValidationError("L must be >= 1");
  if (config.burnIn < 0) throw ValidationError("burnIn negative");
  if (config.sweeps <= config.burnIn) throw ValidationError("sweeps must exceed burnIn");
  if (config.thinning < 1) throw ValidationError("thinning must be >= 1");
  double sites = 1.0;
  for (int k = 0; k < config.params.d; ++k) sites *= config.L;
  if (sites > 1e9) throw ValidationError("lattice too large");
  return config;
}

// ---------------------------------------------------------------------------
// LatticeState

LatticeState::LatticeState(const ModelParams& params, int L) : params_(validate(params)), L_(L) {
  if (L < 1) throw ValidationError("L must be >= 1");
  const int d = params_.d;
  long long n = 1;
  for (int k = 0; k < d; ++k) n *= L;
  spins_.assign(n, static_cast<std::int8_t>(boundary_spin(params_.bc)));
  salt_.assign(n, 0);
  neighbors_.assign(n * 2 * d, -1);
  std::vector<int> coord(d, 0);
  for (long long site = 0; site < n; ++site) {
    long long rest = site;
    for (int k = 0; k < d; ++k) {
      coord[k] = static_cast<int>(rest % L);
      rest /= L;
    }
    long long stride = 1;
    for (int k = 0; k < d; ++k) {
      int* nb = &neighbors_[site * 2 * d + 2 * k];
      nb[0] = coord[k] > 0 ? static_cast<int>(site - stride) : -1;
      nb[1] = coord[k] < L - 1 ? static_cast<int>(site + stride) : -1;
      stride *= L;
    }
  }
  emptySites_.resize(n);
  std::iota(emptySites_.begin(), emptySites_.end(), 0LL);
  slot_.resize(n);
  std::iota(slot_.begin(), slot_.end(), 0LL);
  rebuild_caches();
}

double LatticeState::flip_delta(long long site) const noexcept {
  const int d2 = 2 * params_.d;
  const int bc = boundary_spin(params_.bc);
  const int* nb = neighbors(site);
  int field = 0;
  for (int k = 0; k < d2; ++k) field += nb[k] < 0 ? bc : spins_[nb[k]];
  const int s = spins_[site];
  return 2.0 * params_.J * s * field + 2.0 * params_.h * s + params_.kappa * salt_[site] * s;
}

double LatticeState::move_delta(long long from, long long to) const noexcept {
  const double onIceTo = 0.5 * (1 - spins_[to]);
  const double onIceFrom = 0.5 * (1 - spins_[from]);
  return params_.kappa * (onIceTo - onIceFrom);
}

void LatticeState::flip(long long site, double delta) noexcept {
  const int s = spins_[site];
  spins_[site] = static_cast<std::int8_t>(-s);
  M_ -= 2 * s;
  if (salt_[site]) Q_ -= s;
  energy_ += delta;
}

void LatticeState::move_salt(long long from, long long to, double delta) noexcept {
  // from: salt list -> empty list; to: empty list -> salt list
  const long long fs = slot_[from];
  const long long ts = slot_[to];
  saltSites_[fs] = to;
  emptySites_[ts] = from;
  slot_[to] = fs;
  slot_[from] = ts;
  salt_[from] = 0;
  salt_[to] = 1;
  Q_ += (spins_[to] > 0) - (spins_[from] > 0);
  energy_ += delta;
}

void LatticeState::set_salt(const std::vector<long long>& sites) {
  std::fill(salt_.begin(), salt_.end(), 0);
  for (long long s : sites) {
    if (s < 0 || s >= this->sites()) throw DomainError("salt site out of range");
    if (salt_[s]) throw DomainError("duplicate salt site");
    salt_[s] = 1;
  }
  saltSites_.clear();
  emptySites_.clear();
  for (long long s = 0; s < this->sites(); ++s) {
    auto& list = salt_[s] ? saltSites_ : emptySites_;
    slot_[s] = static_cast<long long>(list.size());
    list.push_back(s);
  }
  rebuild_caches();
}

void LatticeState::set_spin(long long site, int value) {
  if (value != 1 && value != -1) throw DomainError("spin must be +1 or -1");
  spins_[site] = static_cast<std::int8_t>(value);
  rebuild_caches();
}

double LatticeState::recompute_energy() const noexcept {
  const int d2 = 2 * params_.d;
  const int bc = boundary_spin(params_.bc);
  long long bonds = 0;
  long long magnet = 0;
  long long saltOnIce = 0;
  for (long long x = 0; x < sites(); ++x) {
    const int* nb = neighbors(x);
    for (int k = 0; k < d2; ++k) {
      if (nb[k] < 0)
        bonds += spins_[x] * bc;          // boundary bond, counted once
      else if (nb[k] > x)
        bonds += spins_[x] * spins_[nb[k]];  // interior bond, counted once
    }
    magnet += spins_[x];
    if (salt_[x] && spins_[x] < 0) ++saltOnIce;
  }
  return -params_.J * static_cast<double>(bonds) - params_.h * static_cast<double>(magnet) +
         params_.kappa * static_cast<double>(saltOnIce);
}

bool LatticeState::caches_consistent(double relTol) const {
  long long magnet = 0;
  long long q = 0;
  long long n = 0;
  for (long long x = 0; x < sites(); ++x) {
    magnet += spins_[x];
    if (salt_[x]) {
      ++n;
      if (spins_[x] > 0) ++q;
    }
  }
  if (magnet != M_ || q != Q_ || n != salt_total()) return false;
  for (long long s : saltSites_)
    if (!salt_[s]) return false;
  const double fresh = recompute_energy();
  return std::abs(fresh - energy_) <= relTol * std::max(1.0, std::abs(fresh));
}

void LatticeState::rebuild_caches() {
  M_ = 0;
  Q_ = 0;
  for (long long x = 0; x < sites(); ++x) {
    M_ += spins_[x];
    if (salt_[x] && spins_[x] > 0) ++Q_;
  }
  energy_ = recompute_energy();
}

// ---------------------------------------------------------------------------
// Moves

LatticeState init_state(const ChainConfig& config, CounterRng& rng) {
  LatticeState state(config.params, config.L);
  const long long n = state.sites();
  const long long N = salt_count(config.params.c, n);
  std::vector<long long> order(n);
  std::iota(order.begin(), order.end(), 0LL);
  for (long long i = 0; i < N; ++i) {
    const long long j = i + static_cast<long long>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(order[i], order[j]);
  }
  order.resize(N);
  state.set_salt(order);
  return state;
}

bool spin_flip_step(LatticeState& state, long long site, CounterRng& rng, bool perturb) {
  const double delta = state.flip_delta(site);
  double acceptDelta = delta;
  if (perturb && state.has_salt(site)) acceptDelta -= 2.0 * state.params().kappa * state.spin(site);
  const double u = rng.uniform();
  if (acceptDelta <= 0.0 || u < std::exp(-acceptDelta)) {
    state.flip(site, delta);
    return true;
  }
  return false;
}

SwapResult salt_swap_step(LatticeState& state, long long from, long long to, CounterRng& rng) {
  if (from < 0 || to < 0 || from >= state.sites() || to >= state.sites() ||
      !state.has_salt(from) || state.has_salt(to))
    return SwapResult::Invalid;
  const double delta = state.move_delta(from, to);
  const double u = rng.uniform();
  if (delta <= 0.0 || u < std::exp(-delta)) {
    state.move_salt(from, to, delta);
    return SwapResult::Accepted;
  }
  return SwapResult::Rejected;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

struct BlockSums {
  long long count = 0;
  double m = 0.0;     // Σ M/n
  double q = 0.0;     // Σ Q/n
  double plus = 0.0;  // Σ plus-spin count
  double qAbs = 0.0;  // Σ Q
};

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

class Accumulator {
 public:
  Accumulator(long long sites, long long salt, long long blockSize)
      : sites_(sites), salt_(salt), blockSize_(std::max<long long>(64, blockSize)) {
    stats_.sites = sites;
    stats_.saltCount = salt;
    stats_.concentration = static_cast<double>(salt) / static_cast<double>(sites);
    stats_.histM.assign(sites + 1, 0);
  }

  void record(const LatticeState& s, long long sweep, bool joint, bool trace) {
    const long long M = s.magnetization();
    const long long Q = s.salt_on_plus();
    const double n = static_cast<double>(sites_);
    total_.count++;
    current_.count++;
    const double m = M / n;
    for (BlockSums* b : {&total_, &current_}) {
      b->m += m;
      b->q += Q / n;
      b->plus += static_cast<double>(s.plus_count());
      b->qAbs += static_cast<double>(Q);
    }
    sumM2_ += m * m;
    stats_.histM[(M + sites_) / 2]++;
    if (joint) stats_.jointMQ[{M, Q}]++;
    if (trace) stats_.trace.push_back({sweep, M, Q});
    if (current_.count == blockSize_) {
      blocks_.push_back(current_);
      current_ = {};
    }
  }

  void merge(const Accumulator& other) {
    total_.count += other.total_.count;
    total_.m += other.total_.m;
    total_.q += other.total_.q;
    total_.plus += other.total_.plus;
    total_.qAbs += other.total_.qAbs;
    sumM2_ += other.sumM2_;
    blocks_.insert(blocks_.end(), other.blocks_.begin(), other.blocks_.end());
    for (std::size_t i = 0; i < stats_.histM.size(); ++i) stats_.histM[i] += other.stats_.histM[i];
    for (const auto& [k, v] : other.stats_.jointMQ) stats_.jointMQ[k] += v;
    stats_.trace.insert(stats_.trace.end(), other.stats_.trace.begin(), other.stats_.trace.end());
    stats_.flipProposals += other.stats_.flipProposals;
    stats_.flipAccepted += other.stats_.flipAccepted;
    stats_.swapProposals += other.stats_.swapProposals;
    stats_.swapAccepted += other.stats_.swapAccepted;
    stats_.swapInvalid += other.stats_.swapInvalid;
  }

  SampleStats& counters() { return stats_; }

  SampleStats finish() const {
    SampleStats out = stats_;
    out.samples = total_.count;
    if (total_.count == 0) return out;
    const double cnt = static_cast<double>(total_.count);
    const double mean = total_.m / cnt;
    out.varM = total_.count > 1 ? (sumM2_ - cnt * mean * mean) / (cnt - 1.0) : 0.0;
    out.meanM = estimate([](const BlockSums& b) { return b.m / b.count; });
    out.meanQ = estimate([](const BlockSums& b) { return b.q / b.count; });
    const double n = static_cast<double>(sites_);
    out.plusFraction = estimate([n](const BlockSums& b) { return b.plus / (b.count * n); });
    out.occPlus = estimate([](const BlockSums& b) { return b.qAbs / b.plus; });
    const double N = static_cast<double>(salt_);
    out.occMinus = estimate([n, N](const BlockSums& b) {
      return (N * b.count - b.qAbs) / (n * b.count - b.plus);
    });
    out.oddsRatio = estimate([n, N](const BlockSums& b) {
      const double pPlus = b.qAbs / b.plus;
      const double pMinus = (N * b.count - b.qAbs) / (n * b.count - b.plus);
      return (pPlus / (1.0 - pPlus)) / (pMinus / (1.0 - pMinus));
    });
    return out;
  }

 private:
  template <class F>
  Estimate estimate(F f) const {
    Estimate e;
    e.mean = f(total_);
    if (blocks_.size() < 2) {
      e.stdErr = nan();
      return e;
    }
    double s = 0.0, s2 = 0.0;
    for (const auto& b : blocks_) {
      const double v = f(b);
      if (!std::isfinite(v)) {
        // a block with no plus or no minus spins has no defined ratio
        e.stdErr = nan();
        return e;
      }
      s += v;
      s2 += v * v;
    }
    const double k = static_cast<double>(blocks_.size());
    const double mu = s / k;
    const double var = std::max(0.0, (s2 - k * mu * mu) / (k - 1.0));
    e.stdErr = std::sqrt(var / k);
    return e;
  }

  long long sites_;
  long long salt_;
  long long blockSize_;
  BlockSums total_;
  BlockSums current_;
  std::vector<BlockSums> blocks_;
  double sumM2_ = 0.0;
  SampleStats stats_;
};

long long expected_samples(const ChainConfig& c) { return (c.sweeps - c.burnIn) / c.thinning; }

Accumulator sample_chain(const ChainConfig& config, std::uint64_t stream,
                         const SampleObserver& observer) {
  CounterRng rng(config.seed, stream);
  LatticeState state = init_state(config, rng);
  const long long n = state.sites();
  const long long N = state.salt_total();
  Accumulator acc(n, N, expected_samples(config) / 32);
  SampleStats& ctr = acc.counters();
  const bool swaps = N > 0 && N < n;

  for (long long sweep = 1; sweep <= config.sweeps; ++sweep) {
    for (long long x = 0; x < n; ++x) {
      ctr.flipProposals++;
      if (spin_flip_step(state, x, rng, config.perturbAcceptance)) ctr.flipAccepted++;
    }
    if (swaps) {
      for (long long k = 0; k < n; ++k) {
        const long long from = state.random_salt_site(rng);
        const long long to = state.random_empty_site(rng);
        ctr.swapProposals++;
        switch (salt_swap_step(state, from, to, rng)) {
          case SwapResult::Accepted:
            ctr.swapAccepted++;
            break;
          case SwapResult::Rejected:
            break;
          case SwapResult::Invalid:
            ctr.swapInvalid++;
            break;
        }
      }
    }
    if (sweep > config.burnIn && (sweep - config.burnIn) % config.thinning == 0) {
      acc.record(state, sweep, config.recordJoint, config.recordTrace);
      if (observer) observer(state, sweep);
    }
  }
  return acc;
}

}  // namespace

SampleStats run_chain(const ChainConfig& config, std::uint64_t stream,
                      const SampleObserver& observer) {
  return sample_chain(validate(config), stream, observer).finish();
}

SampleStats run_chains(const ChainConfig& config, int chains, unsigned threads) {
  validate(config);
  if (chains < 1) throw ValidationError("chains must be >= 1");
  std::vector<std::optional<Accumulator>> results(chains);
  parallel_for(static_cast<std::size_t>(chains), threads,
               [&](std::size_t i) { results[i].emplace(sample_chain(config, i, {})); });
  Accumulator total = std::move(*results[0]);
  for (int i = 1; i < chains; ++i) total.merge(*results[i]);
  return total.finish();
}

}  // namespace brine
