#include "brine/enumerate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>
#include <gmpxx.h>

#include "brine/errors.hpp"

namespace brine {

namespace {

struct Box {
  long long sites = 0;
  std::vector<std::pair<int, int>> bonds;  // interior nearest-neighbour pairs
  std::vector<int> boundaryBonds;          // bonds from each site to the shell
};

Box make_box(int L, int d) {
  Box box;
  box.sites = 1;
  for (int k = 0; k < d; ++k) box.sites *= L;
  box.boundaryBonds.assign(box.sites, 0);
  for (long long x = 0; x < box.sites; ++x) {
    long long stride = 1;
    for (int k = 0; k < d; ++k) {
      const long long coord = (x / stride) % L;
      if (coord + 1 < L)
        box.bonds.emplace_back(static_cast<int>(x), static_cast<int>(x + stride));
      else
        box.boundaryBonds[x]++;
      if (coord == 0) box.boundaryBonds[x]++;
      stride *= L;
    }
  }
  return box;
}

int spin_of(std::uint64_t mask, int site) { return (mask >> site) & 1U ? 1 : -1; }

// Σ_{<x,y>, x∈Λ} σ_x σ_y including bonds to the frozen shell.
long long bond_sum(const Box& box, std::uint64_t mask, int bc) {
  long long sum = 0;
  for (const auto& [x, y] : box.bonds) sum += spin_of(mask, x) * spin_of(mask, y);
  for (long long x = 0; x < box.sites; ++x)
    sum += static_cast<long long>(box.boundaryBonds[x]) * spin_of(mask, static_cast<int>(x)) * bc;
  return sum;
}

double log_sum_exp(const std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s);
}

}  // namespace

double enumeration_size(const ModelParams& params, int L) {
  double n = 1.0;
  for (int k = 0; k < params.d; ++k) n *= L;
  const long long N = salt_count(params.c, static_cast<long long>(n));
  mpz_class count;
  mpz_bin_uiui(count.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(N));
  count <<= static_cast<mp_bitcnt_t>(n);
  return count.get_d();
}

void for_each_state(const ModelParams& params, int L,
                    const std::function<void(std::uint64_t, std::uint64_t, double)>& visit) {
  const ModelParams p = validate(params);
  if (L < 1) throw ValidationError("L must be >= 1");
  const double size = enumeration_size(p, L);
  if (size > kEnumerationCap)
    throw DomainError(fmt::format("state space has {:.6g} states, above the cap of {:.0e}", size,
                                  kEnumerationCap));
  const Box box = make_box(L, p.d);
  const int n = static_cast<int>(box.sites);
  const long long N = salt_count(p.c, n);
  const int bc = boundary_spin(p.bc);
  const std::uint64_t full = (1ULL << n) - 1;

  std::vector<std::uint64_t> saltMasks;
  if (N == 0) {
    saltMasks.push_back(0);
  } else {
    // Gosper's hack over N-subsets of n bits (n < 64 under the cap).
    const std::uint64_t limit = 1ULL << n;
    for (std::uint64_t s = (1ULL << N) - 1; s < limit;) {
      saltMasks.push_back(s);
      const std::uint64_t low = s & (~s + 1);
      const std::uint64_t ripple = s + low;
      s = (((ripple ^ s) >> 2) / low) | ripple;
    }
  }

  for (std::uint64_t spins = 0; spins <= full; ++spins) {
    const long long bonds = bond_sum(box, spins, bc);
    const long long M = 2LL * std::popcount(spins) - n;
    const double spinPart = p.J * static_cast<double>(bonds) + p.h * static_cast<double>(M);
    for (std::uint64_t salt : saltMasks) {
      const long long onIce = std::popcount(salt & ~spins & full);
      visit(spins, salt, spinPart - p.kappa * static_cast<double>(onIce));
    }
    if (spins == full) break;
  }
}

ExactDistribution exact_enumerate(const ModelParams& params, int L) {
  ExactDistribution dist;
  dist.L = L;
  dist.d = params.d;
  double n = 1.0;
  for (int k = 0; k < params.d; ++k) n *= L;
  dist.sites = static_cast<long long>(n);
  dist.saltCount = salt_count(params.c, dist.sites);

  struct Entry {
    std::uint64_t spins;
    std::uint64_t salt;
    double logw;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(enumeration_size(params, L)));
  for_each_state(params, L, [&](std::uint64_t s, std::uint64_t salt, double logw) {
    entries.push_back({s, salt, logw});
  });

  double top = -INFINITY;
  for (const auto& e : entries) top = std::max(top, e.logw);
  long double z = 0.0L;
  for (const auto& e : entries) z += std::exp(static_cast<long double>(e.logw - top));
  dist.logPartition = top + static_cast<double>(std::log(z));

  const int sites = static_cast<int>(dist.sites);
  dist.spinMarginal.assign(std::size_t{1} << sites, 0.0);
  dist.magnetization.assign(sites + 1, 0.0);
  dist.siteSpinPlus.assign(sites, 0.0);
  dist.siteSalt.assign(sites, 0.0);
  for (const auto& e : entries) {
    const double prob = std::exp(e.logw - dist.logPartition);
    const long long M = 2LL * std::popcount(e.spins) - sites;
    const long long Q = std::popcount(e.salt & e.spins);
    dist.jointMQ[{M, Q}] += prob;
    dist.spinMarginal[e.spins] += prob;
    dist.magnetization[(M + sites) / 2] += prob;
    for (int x = 0; x < sites; ++x) {
      if ((e.spins >> x) & 1U) dist.siteSpinPlus[x] += prob;
      if ((e.salt >> x) & 1U) dist.siteSalt[x] += prob;
    }
  }
  return dist;
}

std::vector<double> conditional_given_m(const ExactDistribution& dist) {
  std::vector<double> out(dist.spinMarginal.size(), 0.0);
  for (std::size_t s = 0; s < out.size(); ++s) {
    const double pm = dist.magnetization[std::popcount(s)];
    out[s] = pm > 0.0 ? dist.spinMarginal[s] / pm : 0.0;
  }
  return out;
}

std::vector<double> ising_conditional_given_m(double J, int L, int d, Boundary bc) {
  const Box box = make_box(L, d);
  const int n = static_cast<int>(box.sites);
  if (n > 30) throw DomainError("ising_conditional_given_m: box too large");
  const std::size_t count = std::size_t{1} << n;
  std::vector<double> logw(count);
  const int b = boundary_spin(bc);
  for (std::size_t s = 0; s < count; ++s) logw[s] = J * static_cast<double>(bond_sum(box, s, b));
  std::vector<std::vector<double>> byM(n + 1);
  for (std::size_t s = 0; s < count; ++s) byM[std::popcount(s)].push_back(logw[s]);
  std::vector<double> norm(n + 1);
  for (int k = 0; k <= n; ++k) norm[k] = log_sum_exp(byM[k]);
  std::vector<double> out(count);
  for (std::size_t s = 0; s < count; ++s) out[s] = std::exp(logw[s] - norm[std::popcount(s)]);
  return out;
}

double total_variation(const std::map<std::pair<long long, long long>, double>& p,
                       const std::map<std::pair<long long, long long>, double>& q) {
  double sum = 0.0;
  for (const auto& [k, v] : p) {
    const auto it = q.find(k);
    sum += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.contains(k)) sum += std::abs(v);
  return 0.5 * sum;
}

}  // namespace brine
