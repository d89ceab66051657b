#include "brine/salt_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "brine/errors.hpp"
#include "brine/numerics.hpp"
#include "brine/params.hpp"

namespace brine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_binomial(long long a, long long b) {
  if (b < 0 || b > a) return -kInf;
  if (b == 0 || b == a) return 0.0;
  return std::lgamma(static_cast<double>(a) + 1.0) - std::lgamma(static_cast<double>(b) + 1.0) -
         std::lgamma(static_cast<double>(a - b) + 1.0);
}

void check_counts(long long n, long long M, long long N) {
  if (n < 1) throw DomainError("site count must be >= 1");
  if (M > n || M < -n) throw DomainError(fmt::format("|M| = {} exceeds n = {}", M, n));
  if ((n + M) % 2 != 0) throw DomainError(fmt::format("parity violation: n + M = {} is odd", n + M));
  if (N < 0 || N > n) throw DomainError(fmt::format("salt count N = {} outside [0, {}]", N, n));
}

}  // namespace

SaltSplit SaltSplit::at(double m, double theta, double c) noexcept {
  SaltSplit s;
  s.m = m;
  s.theta = theta;
  s.c = c;
  s.pPlus = 2.0 * theta * c / (1.0 + m);
  s.pMinus = 2.0 * (1.0 - theta) * c / (1.0 - m);
  return s;
}

double bernoulli_entropy(double p) noexcept {
  if (!(p >= 0.0 && p <= 1.0)) return kInf;
  if (p == 0.0 || p == 1.0) return 0.0;
  return p * std::log(p) + (1.0 - p) * std::log1p(-p);
}

double xi(double m, double theta, double c) noexcept {
  const SaltSplit s = SaltSplit::at(m, theta, c);
  const double sp = bernoulli_entropy(s.pPlus);
  const double sm = bernoulli_entropy(s.pMinus);
  if (std::isinf(sp) || std::isinf(sm)) return -kInf;
  return -0.5 * (1.0 + m) * sp - 0.5 * (1.0 - m) * sm;
}

mpz_class count_salt_configs(long long n, long long M, long long N, long long Q) {
  check_counts(n, M, N);
  const long long plus = (n + M) / 2;
  const long long minus = (n - M) / 2;
  if (Q < 0 || Q > plus || N - Q < 0 || N - Q > minus) return 0;
  mpz_class a, b;
  mpz_bin_uiui(a.get_mpz_t(), static_cast<unsigned long>(plus), static_cast<unsigned long>(Q));
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(minus), static_cast<unsigned long>(N - Q));
  return a * b;
}

double log_of(const mpz_class& value) {
  if (sgn(value) <= 0) return -kInf;
  long exp2 = 0;
  const double mant = mpz_get_d_2exp(&exp2, value.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
}

double log_salt_weight(long long n, long long M, double c, double kappa) {
  const long long N = salt_count(c, n);
  check_counts(n, M, N);
  const long long plus = (n + M) / 2;
  const long long minus = (n - M) / 2;
  const long long qlo = std::max(0LL, N - minus);
  const long long qhi = std::min(plus, N);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(qhi - qlo + 1));
  for (long long q = qlo; q <= qhi; ++q)
    terms.push_back(log_binomial(plus, q) + log_binomial(minus, N - q) + kappa * static_cast<double>(q));
  const double top = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum);
}

SaltSplit optimal_theta(double m, double c, double kappa) {
  if (!(m > -1.0 && m < 1.0)) throw DomainError("optimal_theta: m outside (-1, 1)");
  if (!(c < 1.0)) throw InfeasibleError("concentration exceeds capacity");
  if (!(c >= 0.0)) throw DomainError("optimal_theta: negative concentration");
  const double independent = 0.5 * (1.0 + m);
  if (c == 0.0 || kappa == 0.0) return SaltSplit::at(m, independent, c);

  const double lo = std::max(0.0, 1.0 - (1.0 - m) / (2.0 * c));
  const double hi = std::min(1.0, (1.0 + m) / (2.0 * c));
  if (!(lo < hi)) throw InfeasibleError("concentration exceeds capacity");

  const double theta = numerics::bisect_increasing(
      [&](double t) {
        const SaltSplit s = SaltSplit::at(m, t, c);
        if (s.pPlus >= 1.0 || s.pMinus <= 0.0) return kInf;
        if (s.pMinus >= 1.0 || s.pPlus <= 0.0) return -kInf;
        return numerics::logit(s.pPlus) - numerics::logit(s.pMinus) - kappa;
      },
      lo, hi, 0.0);
  return SaltSplit::at(m, theta, c);
}

}  // namespace brine
