#include "brine/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "brine/errors.hpp"
#include "brine/numerics.hpp"
#include "brine/parallel.hpp"
#include "brine/salt_entropy.hpp"

namespace brine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logistic(double t) noexcept {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void check_concentration(double c) {
  if (!(c < 1.0)) throw InfeasibleError("concentration exceeds capacity (c >= 1)");
  if (!(c >= 0.0)) throw DomainError("negative concentration");
}

}  // namespace

std::string_view to_string(Region r) noexcept {
  switch (r) {
    case Region::Liquid:
      return "liquid";
    case Region::Ice:
      return "ice";
    case Region::PhaseSeparation:
      return "phase-separation";
  }
  return "unknown";
}

double script_g(double m, double theta, const ModelParams& p, const MagnetizationModel& model) {
  if (!(m > -1.0 && m < 1.0)) return kInf;
  const double entropy = xi(m, theta, p.c);
  if (std::isinf(entropy)) return kInf;
  return -p.h * m - p.kappa * theta * p.c - entropy + model.free_energy(m);
}

double big_g(double m, const ModelParams& p, const MagnetizationModel& model) {
  if (!(m > -1.0 && m < 1.0)) return kInf;
  const SaltSplit split = optimal_theta(m, p.c, p.kappa);
  return script_g(m, split.theta, p, model);
}

MoleFractions mole_fractions(double m, double c, double kappa) {
  if (!(m > -1.0 && m < 1.0)) throw DomainError("mole_fractions: m outside (-1, 1)");
  check_concentration(c);
  MoleFractions out{0.0, 0.0, m, c, kappa};
  if (c == 0.0) return out;
  if (kappa == 0.0) {
    out.qPlus = out.qMinus = c;
    return out;
  }
  const double plus = 0.5 * (1.0 + m);
  const double minus = 0.5 * (1.0 - m);
  // With R+ = e^t and R- = e^(t-κ), the mass balance is increasing in t.
  const double t = numerics::bisect_increasing(
      [&](double s) { return plus * logistic(s) + minus * logistic(s - kappa) - c; }, -800.0,
      800.0 + kappa, 0.0);
  out.qPlus = logistic(t);
  out.qMinus = logistic(t - kappa);
  return out;
}

double salt_field(double m, double c, double kappa) {
  const MoleFractions q = mole_fractions(m, c, kappa);
  return 0.5 * (std::log1p(-q.qPlus) - std::log1p(-q.qMinus));
}

double field_for_m(double m, double c, double kappa, double mStar) {
  if (std::abs(m) > mStar)
    throw DomainError(
        fmt::format("field_for_m: |m| = {} > m* = {}: outside coexistence interval; use "
                    "minimize_g inverse",
                    std::abs(m), mStar));
  return salt_field(m, c, kappa);
}

double stationarity(double m, const ModelParams& p, const MagnetizationModel& model) {
  return salt_field(m, p.c, p.kappa) + model.free_energy_slope(m);
}

Region classify(double m, double mStar) noexcept {
  if (m >= mStar) return Region::Liquid;
  if (m <= -mStar) return Region::Ice;
  return Region::PhaseSeparation;
}

double droplet_fraction(double m, double mStar, Boundary bc) noexcept {
  if (mStar <= 0.0) return 0.0;
  const double lambda =
      bc == Boundary::Plus ? (mStar - m) / (2.0 * mStar) : (m + mStar) / (2.0 * mStar);
  return std::clamp(lambda, 0.0, 1.0);
}

VariationalSolution minimize_g(const ModelParams& params, const MagnetizationModel& model) {
  const ModelParams p = validate(params);
  const double mStar = model.spontaneous_m();
  if (p.kappa * p.c == 0.0 && p.h == 0.0 && mStar > 0.0)
    throw NonUniqueError(
        fmt::format("non-unique minimizer on [-m*, m*] = [{}, {}]: kappa*c = 0 and h = 0", -mStar,
                    mStar),
        -mStar, mStar);

  const double m = numerics::bisect_increasing(
      [&](double x) { return stationarity(x, p, model) - p.h; }, -1.0, 1.0, 0.0);

  VariationalSolution sol;
  sol.m = m;
  const SaltSplit split = optimal_theta(m, p.c, p.kappa);
  sol.theta = split.theta;
  sol.pPlus = split.pPlus;
  sol.pMinus = split.pMinus;
  const MoleFractions q = mole_fractions(m, p.c, p.kappa);
  sol.qPlus = q.qPlus;
  sol.qMinus = q.qMinus;
  sol.value = script_g(m, split.theta, p, model);
  sol.region = classify(m, mStar);
  sol.dropletFraction = droplet_fraction(m, mStar, p.bc);
  return sol;
}

PhaseBoundary phase_boundaries(std::span<const double> cGrid, double kappa,
                               const MagnetizationModel& model, unsigned threads) {
  const double mStar = model.spontaneous_m();
  if (!(mStar > 0.0))
    throw DomainError(fmt::format("no coexistence below J_c (m* = 0 at J = {})", model.coupling()));
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ValidationError("kappa negative");
  PhaseBoundary out;
  out.rows.resize(cGrid.size());
  parallel_for(cGrid.size(), threads, [&](std::size_t i) {
    const double c = cGrid[i];
    check_concentration(c);
    out.rows[i] = {c, field_for_m(-mStar, c, kappa, mStar), field_for_m(mStar, c, kappa, mStar)};
  });
  return out;
}

DiluteCheck dilute_check(double c, double kappa, const MagnetizationModel& model) {
  const double mStar = model.spontaneous_m();
  const MoleFractions q = mole_fractions(mStar, c, kappa);
  return {2.0 * field_for_m(mStar, c, kappa, mStar), q.qMinus - q.qPlus};
}

}  // namespace brine
