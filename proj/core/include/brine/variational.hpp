#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "brine/free_energy.hpp"
#include "brine/params.hpp"

namespace brine {

enum class Region { Liquid, Ice, PhaseSeparation };

std::string_view to_string(Region r) noexcept;

/// Equilibrium salt occupation probabilities on plus (liquid) and minus (ice)
/// spins: odds(qPlus) = e^κ odds(qMinus) and qPlus(1+m)/2 + qMinus(1-m)/2 = c.
struct MoleFractions {
  double qPlus = 0.0;
  double qMinus = 0.0;
  double m = 0.0;
  double c = 0.0;
  double kappa = 0.0;

  double oddsPlus() const noexcept { return qPlus / (1.0 - qPlus); }
  double oddsMinus() const noexcept { return qMinus / (1.0 - qMinus); }
};

struct VariationalSolution {
  double m = 0.0;
  double theta = 0.0;
  double value = 0.0;  ///< G_{h,c}(m) at the minimiser
  double pPlus = 0.0;  ///< from the inner θ problem
  double pMinus = 0.0;
  double qPlus = 0.0;  ///< from the mole-fraction system
  double qMinus = 0.0;
  Region region = Region::Liquid;
  double dropletFraction = 0.0;
};

struct PhaseBoundaryRow {
  double c;
  double hMinus;
  double hPlus;
};

struct PhaseBoundary {
  std::vector<PhaseBoundaryRow> rows;
};

/// 𝒢_{h,c}(m, θ) = -hm - κθc - Ξ(m, θ; c) + F_J(m); +inf where Ξ is infeasible.
double script_g(double m, double theta, const ModelParams& params, const MagnetizationModel& model);

/// G_{h,c}(m) = min over θ of script_g.
double big_g(double m, const ModelParams& params, const MagnetizationModel& model);

/// Solves the mole-fraction system by bisection on log(qPlus/(1-qPlus)).
/// Throws InfeasibleError for c >= 1.
MoleFractions mole_fractions(double m, double c, double kappa);

/// 1/2 log[(1-qPlus)/(1-qMinus)]: the salt contribution to dG/dm, valid for any m.
double salt_field(double m, double c, double kappa);

/// Field h at which the minimiser equals m, for |m| <= m*.
/// Throws DomainError outside the coexistence interval.
double field_for_m(double m, double c, double kappa, double mStar);

/// dG/dm + h: strictly increasing in m when κc > 0.
double stationarity(double m, const ModelParams& params, const MagnetizationModel& model);

/// Unique minimiser of G_{h,c}. Throws NonUniqueError when κc = 0, h = 0 and
/// m* > 0 (every m in [-m*, m*] minimises).
VariationalSolution minimize_g(const ModelParams& params, const MagnetizationModel& model);

Region classify(double m, double mStar) noexcept;

/// Volume fraction of the droplet (the phase opposite the boundary condition)
/// from the lever rule, clamped to [0, 1].
double droplet_fraction(double m, double mStar, Boundary bc) noexcept;

/// h-(c) and h+(c) for each concentration. Throws DomainError when m* = 0.
PhaseBoundary phase_boundaries(std::span<const double> cGrid, double kappa,
                               const MagnetizationModel& model, unsigned threads = 1);

struct DiluteCheck {
  double twoH;    ///< 2 h+(c)
  double deltaQ;  ///< qMinus - qPlus at m*
};

DiluteCheck dilute_check(double c, double kappa, const MagnetizationModel& model);

}  // namespace brine
