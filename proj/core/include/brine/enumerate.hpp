#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "brine/params.hpp"

namespace brine {

/// Largest number of (spin, salt) states exact_enumerate will visit.
inline constexpr double kEnumerationCap = 1e8;

/// Exact law of P_L^{bc,c,h} on a tiny box. Spin configurations are bit masks
/// over sites (bit set = spin +1); salt configurations likewise (bit set = salt).
struct ExactDistribution {
  int L = 0;
  int d = 0;
  long long sites = 0;
  long long saltCount = 0;
  double logPartition = 0.0;
  std::map<std::pair<long long, long long>, double> jointMQ;  ///< P(M_L, Q_L)
  std::vector<double> magnetization;  ///< P(M_L) indexed by (M_L + n)/2
  std::vector<double> spinMarginal;   ///< P(σ) indexed by spin mask
  std::vector<double> siteSpinPlus;   ///< P(σ_x = +1)
  std::vector<double> siteSalt;       ///< P(S_x = 1)
};

/// Number of states 2^n C(n, ⌊cn⌋) for an L^d box.
double enumeration_size(const ModelParams& params, int L);

/// Calls visit(spinMask, saltMask, -βH) for every state with N_L = ⌊cL^d⌋.
/// βH is built from integer bond, spin and salt-on-ice counts, so states that
/// share those counts get bit-identical weights. Throws DomainError above the cap.
void for_each_state(const ModelParams& params, int L,
                    const std::function<void(std::uint64_t, std::uint64_t, double)>& visit);

ExactDistribution exact_enumerate(const ModelParams& params, int L);

/// P(σ | M_L) for the salted measure, indexed by spin mask.
std::vector<double> conditional_given_m(const ExactDistribution& dist);

/// P^J(σ | M_L) for the pure zero-field Ising model with the same boundary condition.
std::vector<double> ising_conditional_given_m(double J, int L, int d, Boundary bc);

/// ½ Σ |p - q| over the union of keys.
double total_variation(const std::map<std::pair<long long, long long>, double>& p,
                       const std::map<std::pair<long long, long long>, double>& q);

}  // namespace brine
