#pragma once

#include <string_view>

#include <json.hpp>

namespace brine {

enum class Boundary { Plus, Minus };

/// +1 for plus boundary spins, -1 for minus.
constexpr int boundary_spin(Boundary bc) noexcept { return bc == Boundary::Plus ? 1 : -1; }

std::string_view to_string(Boundary bc) noexcept;
Boundary boundary_from_string(std::string_view s);

/// Dimensionless parameters of the Ising-reduced solvent/solute model. The
/// inverse temperature is absorbed into J, h and kappa.
struct ModelParams {
  double J = 0.0;      ///< nearest-neighbour coupling, >= 0
  double h = 0.0;      ///< external field
  double kappa = 0.0;  ///< salt-ice repulsion, finite and >= 0
  double c = 0.0;      ///< salt concentration in [0, 1)
  int d = 2;           ///< lattice dimension
  Boundary bc = Boundary::Plus;

  bool operator==(const ModelParams&) const = default;
};

/// Parameters of the general ice/liquid/salt lattice gas before reduction.
struct RawParams {
  double alphaI = 0.0;  ///< ice-ice attraction
  double alphaL = 0.0;  ///< liquid-liquid attraction
  double muL = 0.0;     ///< liquid fugacity
  double muS = 0.0;     ///< salt fugacity
  double kappa = 0.0;   ///< salt-ice repulsion
  int d = 2;
};

struct IsingCoupling {
  double J;
  double h;
};

/// J = (alphaL + alphaI)/4, h = d/2 (alphaL - alphaI) + muL/2.
/// Throws ValidationError on non-finite input.
IsingCoupling reduce_to_ising(const RawParams& raw);

/// Field seen by the spins once salt is integrated out grand-canonically:
/// h + 1/2 log[(1 + e^muS) / (1 + e^(muS - kappa))].
double effective_field(double h, double muS, double kappa) noexcept;

/// Returns `params` unchanged or throws ValidationError naming the first bad field.
ModelParams validate(const ModelParams& params);

/// Number of salt particles ⌊c n⌋ on n sites.
long long salt_count(double c, long long sites) noexcept;

void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);

}  // namespace brine
