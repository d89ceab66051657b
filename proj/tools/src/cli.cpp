#include "brine_cli/cli.hpp"

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "brine/errors.hpp"
#include "commands.hpp"
#include "output.hpp"

namespace brine::cli {

namespace {

enum class Kind { Real, Integer, Seed, Text, Flag, RealList };

struct Key {
  std::string name;  // config-file key
  std::string flag;  // command-line flag
  Kind kind;
  nlohmann::json fallback;  // null = unset
  std::string help;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<Key> keys;
  std::function<int(Context&)> run;
};

std::vector<Key> model_keys(double J, double h, double kappa, double c) {
  return {
      {"J", "--J", Kind::Real, J, "nearest-neighbour coupling"},
      {"h", "--h", Kind::Real, h, "external field"},
      {"kappa", "--kappa", Kind::Real, kappa, "salt-ice repulsion"},
      {"c", "--c", Kind::Real, c, "salt concentration in [0,1)"},
      {"d", "--d", Kind::Integer, 2, "lattice dimension"},
      {"bc", "--bc", Kind::Text, "plus", "boundary condition: plus or minus"},
  };
}

Key model_choice() {
  return {"model", "--model", Kind::Text, "onsager", "mean-field, onsager or tabulated:<csv>"};
}

Key output_key() { return {"output", "--output,-o", Kind::Text, nullptr, "output file (default stdout)"}; }

std::vector<Key> chain_keys(int L, long long sweeps, long long thin) {
  return {
      {"L", "--L", Kind::Integer, L, "box side length"},
      {"seed", "--seed", Kind::Seed, 1, "RNG seed"},
      {"sweeps", "--sweeps", Kind::Integer, sweeps, "total sweeps"},
      {"burn_in", "--burn-in", Kind::Integer, nullptr, "sweeps discarded before sampling (default 20% of sweeps)"},
      {"thin", "--thin", Kind::Integer, thin, "sweeps between samples"},
  };
}

template <class... Lists>
std::vector<Key> join(Lists... lists) {
  std::vector<Key> all;
  (all.insert(all.end(), lists.begin(), lists.end()), ...);
  return all;
}

std::vector<Command> commands() {
  return {
      {"inspect", "evaluate the entropy and variational functionals at one point",
       join(model_keys(0.6, 0.0, 1.0, 0.2),
            std::vector<Key>{model_choice(), output_key(),
                             {"m", "--m", Kind::Real, 0.0, "magnetization"},
                             {"theta", "--theta", Kind::Real, nullptr, "salt split (default: optimal)"}}),
       cmd_inspect},
      {"phase-diagram", "trace h-(c) and h+(c); CSV plus SVG",
       join(std::vector<Key>{{"J", "--J", Kind::Real, 0.6, "nearest-neighbour coupling"},
                             {"kappa", "--kappa", Kind::Real, 1.0, "salt-ice repulsion"},
                             {"d", "--d", Kind::Integer, 2, "lattice dimension"}},
            std::vector<Key>{model_choice(), output_key(),
                             {"c_min", "--c-min", Kind::Real, 0.0, "first concentration"},
                             {"c_max", "--c-max", Kind::Real, 0.25, "last concentration"},
                             {"c_steps", "--c-steps", Kind::Integer, 26, "number of grid points"},
                             {"c_grid", "--c-grid", Kind::RealList, nullptr, "explicit comma-separated grid"},
                             {"svg", "--svg", Kind::Text, nullptr, "SVG path (default: output with .svg)"}}),
       cmd_phase_diagram},
      {"minimize", "minimise G over m", join(model_keys(0.6, 0.0, 1.0, 0.1), std::vector<Key>{model_choice(), output_key()}),
       cmd_minimize},
      {"simulate", "Metropolis sampling of the lattice model",
       join(model_keys(0.6, 0.0, 1.0, 0.1), chain_keys(16, 10000, 10),
            std::vector<Key>{output_key(),
                             {"chains", "--chains", Kind::Integer, 1, "independent chains"},
                             {"samples", "--samples", Kind::Text, nullptr, "per-sample CSV sweep,M,Q"},
                             {"joint", "--joint", Kind::Flag, false, "include the (M,Q) histogram"}}),
       cmd_simulate},
      {"validate", "exact-enumeration and identity checks on a small box",
       join(model_keys(0.4, -0.05, 1.0, 2.0 / 9.0), chain_keys(3, 600000, 1),
            std::vector<Key>{output_key(),
                             {"random_cases", "--random-cases", Kind::Integer, 100, "random mole-fraction checks"},
                             {"perturb_acceptance", "--perturb-acceptance", Kind::Flag, false,
                              "use a wrong spin-flip rule (negative control)"}}),
       cmd_validate},
      {"free-energy", "tabulate F_J on a symmetric grid; CSV m,F",
       std::vector<Key>{{"J", "--J", Kind::Real, 0.6, "nearest-neighbour coupling"},
                        {"d", "--d", Kind::Integer, 2, "lattice dimension"},
                        model_choice(),
                        output_key(),
                        {"grid", "--grid", Kind::Integer, 200, "grid points"}},
       cmd_free_energy},
  };
}

nlohmann::json convert(const Key& key, const CLI::Option* opt) {
  switch (key.kind) {
    case Kind::Real: return opt->as<double>();
    case Kind::Integer: return opt->as<long long>();
    case Kind::Seed: return opt->as<std::uint64_t>();
    case Kind::Text: return opt->as<std::string>();
    case Kind::Flag: return true;
    case Kind::RealList: return opt->as<std::vector<double>>();
  }
  return nullptr;
}

void check_type(const Key& key, const nlohmann::json& v) {
  const bool ok = v.is_null() || [&] {
    switch (key.kind) {
      case Kind::Real: return v.is_number();
      case Kind::Integer: return v.is_number_integer();
      case Kind::Seed: return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
      case Kind::Text: return v.is_string();
      case Kind::Flag: return v.is_boolean();
      case Kind::RealList: return v.is_array();
    }
    return false;
  }();
  if (!ok) throw ValidationError(fmt::format("config key '{}' has the wrong type", key.name));
}

nlohmann::json read_config(const std::string& path, const Command& cmd) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(fmt::format("config file {}: {}", path, e.what()));
  }
  // a run manifest can be fed back as a config
  if (j.is_object() && j.contains("command") && j.contains("config")) {
    if (j["command"] != cmd.name)
      throw ValidationError(fmt::format("manifest is for '{}', not '{}'", j["command"].get<std::string>(), cmd.name));
    j = j["config"];
  }
  if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto k = std::find_if(cmd.keys.begin(), cmd.keys.end(), [&](const Key& x) { return x.name == it.key(); });
    if (k == cmd.keys.end()) throw ValidationError(fmt::format("unknown config key '{}' for {}", it.key(), cmd.name));
    check_type(*k, it.value());
  }
  return j;
}

void write_manifest(const Context& ctx, std::ostream& err) {
  const nlohmann::json manifest = ctx.manifest.to_json();
  if (ctx.config.contains("output") && !ctx.config["output"].is_null()) {
    const std::string path = ctx.config["output"].get<std::string>() + ".manifest.json";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    write_json(f, manifest);
  } else {
    write_json(err, manifest);
  }
}

int report(std::ostream& err, int code, const char* kind, const std::exception& e) {
  err << "brine: " << kind << ": " << e.what() << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto table = commands();
  CLI::App app{"Ice/water/salt lattice model: variational phase diagram and Monte Carlo", "brine"};
  app.set_help_flag("--help", "print help and exit");
  app.set_version_flag("--version", std::string(BRINE_VERSION));
  app.require_subcommand(1);

  std::string configPath;
  std::vector<std::pair<const Command*, std::vector<CLI::Option*>>> registered;
  for (const auto& cmd : table) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->set_help_flag("--help", "print help and exit");  // -h is the field
    sub->add_option("--config", configPath, "JSON config file (flags override it)");
    std::vector<CLI::Option*> opts;
    for (const auto& key : cmd.keys) {
      if (key.kind == Kind::Flag)
        opts.push_back(sub->add_flag(key.flag, key.help));
      else if (key.kind == Kind::RealList)
        opts.push_back(sub->add_option(key.flag, key.help)->delimiter(',')->expected(1, -1));
      else
        opts.push_back(sub->add_option(key.flag, key.help)->expected(1));
    }
    registered.emplace_back(&cmd, std::move(opts));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, x;
    const int code = app.exit(e, o, x);
    out << o.str();
    err << x.str();
    return code == 0 ? 0 : kInvalid;
  }

  for (const auto& [cmd, opts] : registered) {
    if (!app.got_subcommand(cmd->name)) continue;
    Context ctx{nlohmann::json::object(), out, err, {}};
    ctx.manifest.command = cmd->name;
    ctx.manifest.version = BRINE_VERSION;
    try {
      const nlohmann::json file = configPath.empty() ? nlohmann::json::object() : read_config(configPath, *cmd);
      for (std::size_t i = 0; i < cmd->keys.size(); ++i) {
        const Key& key = cmd->keys[i];
        if (opts[i]->count() > 0)
          ctx.config[key.name] = convert(key, opts[i]);
        else if (file.contains(key.name))
          ctx.config[key.name] = file[key.name];
        else
          ctx.config[key.name] = key.fallback;
      }
      ctx.manifest.config = ctx.config;
      const int code = cmd->run(ctx);
      write_manifest(ctx, err);
      return code;
    } catch (const CLI::ConversionError& e) {
      return report(err, kInvalid, "invalid value", e);
    } catch (const ValidationError& e) {
      return report(err, kInvalid, "invalid input", e);
    } catch (const DomainError& e) {
      return report(err, kInvalid, "out of domain", e);
    } catch (const NonUniqueError& e) {
      return report(err, kNonUnique, "non-unique solution", e);
    } catch (const InfeasibleError& e) {
      return report(err, kInfeasible, "infeasible", e);
    } catch (const nlohmann::json::exception& e) {
      return report(err, kInvalid, "invalid config", e);
    } catch (const std::exception& e) {
      return report(err, kCheckFailed, "error", e);
    }
  }
  return kInvalid;
}

}  // namespace brine::cli
