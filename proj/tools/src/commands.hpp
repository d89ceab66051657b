#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "brine/free_energy.hpp"
#include "brine/params.hpp"
#include "manifest.hpp"

namespace brine::cli {

struct Context {
  nlohmann::json config;  ///< fully resolved settings
  std::ostream& out;
  std::ostream& err;
  RunManifest manifest;

  /// Writes the primary artifact to config["output"] or to `out`.
  void emit(const std::string& content);
  /// Writes a secondary artifact to `path` and records its digest.
  void emit_file(const std::string& path, const std::string& content);
};

/// Model parameters from the resolved config. c >= 1 raises InfeasibleError.
ModelParams model_params(const nlohmann::json& config);
/// "mean-field", "onsager" or "tabulated:<csv path>".
ModelPtr make_model(const nlohmann::json& config);

int cmd_inspect(Context& ctx);
int cmd_phase_diagram(Context& ctx);
int cmd_minimize(Context& ctx);
int cmd_simulate(Context& ctx);
int cmd_validate(Context& ctx);
int cmd_free_energy(Context& ctx);

}  // namespace brine::cli
