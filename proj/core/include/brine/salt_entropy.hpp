#pragma once

#include <gmpxx.h>

namespace brine {

/// Split of the salt between plus and minus spins at magnetization m:
/// a fraction theta of the salt sits on plus spins, giving per-site occupation
/// probabilities pPlus = 2θc/(1+m) and pMinus = 2(1-θ)c/(1-m).
struct SaltSplit {
  double m = 0.0;
  double theta = 0.0;
  double c = 0.0;
  double pPlus = 0.0;
  double pMinus = 0.0;

  static SaltSplit at(double m, double theta, double c) noexcept;

  bool feasible() const noexcept { return pPlus <= 1.0 && pMinus <= 1.0; }
};

/// Bernoulli entropy p log p + (1-p) log(1-p), with 0 log 0 = 0 and +inf outside [0, 1].
double bernoulli_entropy(double p) noexcept;

/// Entropy rate of salt placements at magnetization m, plus-fraction theta and
/// concentration c; -inf if an occupation probability exceeds one.
double xi(double m, double theta, double c) noexcept;

/// Number of ways to put Q salt particles on the (n+M)/2 plus sites and N-Q on
/// the (n-M)/2 minus sites. Throws DomainError on bad parity or ranges.
mpz_class count_salt_configs(long long n, long long M, long long N, long long Q);

/// Natural log of a positive big integer (-inf for zero).
double log_of(const mpz_class& value);

/// log Σ_Q count_salt_configs(n, M, ⌊cn⌋, Q) e^(κQ), evaluated in log space.
double log_salt_weight(long long n, long long M, double c, double kappa);

/// The θ maximising κθc + Ξ(m, θ; c), i.e. the solution of
/// odds(pPlus) = e^κ odds(pMinus). Bisection in θ to machine precision.
/// Throws InfeasibleError if c >= 1, DomainError if m is outside (-1, 1).
SaltSplit optimal_theta(double m, double c, double kappa);

}  // namespace brine
