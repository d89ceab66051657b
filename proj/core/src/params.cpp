#include "brine/params.hpp"

#include <cmath>
#include <string>

#include "brine/errors.hpp"

namespace brine {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) noexcept {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string(name) + " not finite");
}

}  // namespace

std::string_view to_string(Boundary bc) noexcept { return bc == Boundary::Plus ? "plus" : "minus"; }

Boundary boundary_from_string(std::string_view s) {
  if (s == "plus" || s == "+") return Boundary::Plus;
  if (s == "minus" || s == "-") return Boundary::Minus;
  throw ValidationError("bc must be \"plus\" or \"minus\", got \"" + std::string(s) + "\"");
}

IsingCoupling reduce_to_ising(const RawParams& raw) {
  require_finite(raw.alphaI, "alphaI");
  require_finite(raw.alphaL, "alphaL");
  require_finite(raw.muL, "muL");
  require_finite(raw.muS, "muS");
  require_finite(raw.kappa, "kappa");
  if (raw.kappa < 0.0) throw ValidationError("kappa negative");
  if (raw.d < 1) throw ValidationError("d must be >= 1");
  const double J = (raw.alphaL + raw.alphaI) / 4.0;
  const double h = 0.5 * raw.d * (raw.alphaL - raw.alphaI) + 0.5 * raw.muL;
  return {J, h};
}

double effective_field(double h, double muS, double kappa) noexcept {
  if (kappa == 0.0) return h;
  return h + 0.5 * (softplus(muS) - softplus(muS - kappa));
}

ModelParams validate(const ModelParams& p) {
  require_finite(p.J, "J");
  require_finite(p.h, "h");
  if (std::isinf(p.kappa)) throw ValidationError("kappa infinite (only finite kappa is supported)");
  require_finite(p.kappa, "kappa");
  require_finite(p.c, "c");
  if (p.J < 0.0) throw ValidationError("J negative");
  if (p.kappa < 0.0) throw ValidationError("kappa negative");
  if (p.c < 0.0 || p.c >= 1.0) throw ValidationError("c out of [0,1)");
  if (p.d < 1) throw ValidationError("d must be >= 1");
  return p;
}

long long salt_count(double c, long long sites) noexcept {
  return static_cast<long long>(std::floor(c * static_cast<double>(sites) + 1e-9));
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"J", p.J}, {"h", p.h}, {"kappa", p.kappa},
                     {"c", p.c}, {"d", p.d}, {"bc", std::string(to_string(p.bc))}};
}

void from_json(const nlohmann::json& j, ModelParams& p) {
  ModelParams out;
  try {
    if (j.contains("J")) out.J = j.at("J").get<double>();
    if (j.contains("h")) out.h = j.at("h").get<double>();
    if (j.contains("kappa")) out.kappa = j.at("kappa").get<double>();
    if (j.contains("c")) out.c = j.at("c").get<double>();
    if (j.contains("d")) out.d = j.at("d").get<int>();
    if (j.contains("bc")) out.bc = boundary_from_string(j.at("bc").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed ModelParams JSON: ") + e.what());
  }
  p = out;
}

}  // namespace brine
