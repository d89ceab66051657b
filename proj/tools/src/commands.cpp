#include "commands.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "brine/enumerate.hpp"
#include "brine/errors.hpp"
#include "brine/lattice.hpp"
#include "brine/parallel.hpp"
#include "brine/rng.hpp"
#include "brine/salt_entropy.hpp"
#include "brine/variational.hpp"
#include "output.hpp"

namespace brine::cli {

namespace {

std::string dump(const nlohmann::json& j) {
  std::ostringstream s;
  write_json(s, j);
  return s.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path);
}

bool has(const nlohmann::json& config, const char* key) {
  return config.contains(key) && !config[key].is_null();
}

ChainConfig chain_config(const nlohmann::json& config) {
  ChainConfig c;
  c.params = model_params(config);
  c.L = config.at("L").get<int>();
  c.seed = config.at("seed").get<std::uint64_t>();
  c.sweeps = config.at("sweeps").get<long long>();
  c.burnIn = has(config, "burn_in") ? config["burn_in"].get<long long>() : c.sweeps / 5;
  c.thinning = config.at("thin").get<long long>();
  return validate(c);
}

std::map<std::pair<long long, long long>, double> normalise(const SampleStats& s) {
  std::map<std::pair<long long, long long>, double> p;
  for (const auto& [k, v] : s.jointMQ) p[k] = static_cast<double>(v) / static_cast<double>(s.samples);
  return p;
}

nlohmann::json check(const std::string& name, bool pass, double value, double tolerance) {
  return {{"name", name}, {"pass", pass}, {"value", value}, {"tolerance", tolerance}};
}

}  // namespace

void Context::emit(const std::string& content) {
  if (has(config, "output")) {
    emit_file(config["output"].get<std::string>(), content);
  } else {
    out << content;
    out.flush();
    manifest.digests.emplace_back("-", sha256_hex(content));
  }
}

void Context::emit_file(const std::string& path, const std::string& content) {
  write_text(path, content);
  manifest.digests.emplace_back(path, sha256_file(path));
}

ModelParams model_params(const nlohmann::json& config) {
  ModelParams p;
  p.J = config.value("J", 0.0);
  p.h = config.value("h", 0.0);
  p.kappa = config.value("kappa", 0.0);
  p.c = config.value("c", 0.0);
  p.d = config.value("d", 2);
  p.bc = boundary_from_string(config.value("bc", std::string("plus")));
  if (std::isfinite(p.c) && p.c >= 1.0)
    throw InfeasibleError(fmt::format("salt concentration c={} is infeasible: need c < 1", p.c));
  return validate(p);
}

ModelPtr make_model(const nlohmann::json& config) {
  const std::string name = config.at("model").get<std::string>();
  const double J = config.at("J").get<double>();
  const int d = config.value("d", 2);
  if (name == "mean-field") return make_mean_field(J, d);
  if (name == "onsager") {
    if (d != 2) throw ValidationError("the onsager model is two-dimensional; use --d 2 or --model mean-field");
    return make_onsager_2d(J);
  }
  if (name.rfind("tabulated:", 0) == 0) {
    const std::string path = name.substr(10);
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read magnetization table " + path);
    return make_tabulated(read_magnetization_csv(in), J);
  }
  throw ValidationError("unknown model '" + name + "' (mean-field, onsager, tabulated:<path>)");
}

int cmd_inspect(Context& ctx) {
  const auto& cfg = ctx.config;
  const ModelParams p = model_params(cfg);
  const auto model = make_model(cfg);
  const double m = cfg.at("m").get<double>();
  if (!(m > -1.0 && m < 1.0)) throw ValidationError("m must lie in (-1, 1)");
  const SaltSplit split = optimal_theta(m, p.c, p.kappa);
  const double theta = has(cfg, "theta") ? cfg["theta"].get<double>() : split.theta;
  nlohmann::json j{
      {"m", m},
      {"h", p.h},
      {"c", p.c},
      {"kappa", p.kappa},
      {"theta_star", split.theta},
      {"p_plus", split.pPlus},
      {"p_minus", split.pMinus},
      {"xi", xi(m, split.theta, p.c)},
      {"theta", theta},
      {"script_g", script_g(m, theta, p, *model)},
      {"big_g", big_g(m, p, *model)},
      {"free_energy", model->free_energy(m)},
  };
  ctx.emit(dump(j));
  return 0;
}

int cmd_phase_diagram(Context& ctx) {
  const auto& cfg = ctx.config;
  nlohmann::json withC = cfg;
  withC["c"] = 0.0;
  const ModelParams p = model_params(withC);
  const auto model = make_model(cfg);
  std::vector<double> grid;
  if (has(cfg, "c_grid")) {
    grid = cfg["c_grid"].get<std::vector<double>>();
  } else {
    const double lo = cfg.at("c_min").get<double>(), hi = cfg.at("c_max").get<double>();
    const int steps = cfg.at("c_steps").get<int>();
    if (steps < 1) throw ValidationError("c_steps must be at least 1");
    for (int i = 0; i < steps; ++i) grid.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
  }
  for (double c : grid)
    if (!(c >= 0.0 && c < 1.0)) throw ValidationError(fmt::format("c-grid value {} out of [0,1)", c));
  const PhaseBoundary b = phase_boundaries(grid, p.kappa, *model, default_thread_count());
  std::ostringstream csv;
  write_phase_csv(csv, b);
  ctx.emit(csv.str());

  std::string svgPath;
  if (has(cfg, "svg")) {
    svgPath = cfg["svg"].get<std::string>();
  } else if (has(cfg, "output")) {
    svgPath = cfg["output"].get<std::string>();
    const auto dot = svgPath.find_last_of('.');
    const auto slash = svgPath.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) svgPath.erase(dot);
    svgPath += ".svg";
  }
  if (!svgPath.empty()) {
    std::ostringstream svg;
    write_phase_svg(svg, b, p.J, p.kappa);
    ctx.emit_file(svgPath, svg.str());
  }
  return 0;
}

int cmd_minimize(Context& ctx) {
  const ModelParams p = model_params(ctx.config);
  const auto model = make_model(ctx.config);
  try {
    ctx.emit(dump(to_json(minimize_g(p, *model))));
    return 0;
  } catch (const NonUniqueError& e) {
    ctx.emit(dump({{"error", "non-unique"},
                   {"message", e.what()},
                   {"m_lower", e.lower()},
                   {"m_upper", e.upper()}}));
    ctx.err << "brine: " << e.what() << "\n";
    return 3;
  }
}

int cmd_simulate(Context& ctx) {
  const auto& cfg = ctx.config;
  ChainConfig chain = chain_config(cfg);
  ctx.manifest.config["burn_in"] = chain.burnIn;
  chain.recordTrace = has(cfg, "samples");
  chain.recordJoint = cfg.value("joint", false);
  const int chains = cfg.at("chains").get<int>();
  if (chains < 1) throw ValidationError("chains must be at least 1");
  const SampleStats stats = run_chains(chain, chains, default_thread_count());
  ctx.manifest.seeds = {chain.seed};
  ctx.emit(dump(to_json(stats)));
  if (chain.recordTrace) {
    std::ostringstream csv;
    write_trace_csv(csv, stats);
    ctx.emit_file(cfg["samples"].get<std::string>(), csv.str());
  }
  return 0;
}

int cmd_validate(Context& ctx) {
  const auto& cfg = ctx.config;
  ChainConfig chain = chain_config(cfg);
  ctx.manifest.config["burn_in"] = chain.burnIn;
  chain.recordJoint = true;
  chain.perturbAcceptance = cfg.value("perturb_acceptance", false);
  const ModelParams& p = chain.params;
  ctx.manifest.seeds = {chain.seed};
  nlohmann::json checks = nlohmann::json::array();

  const ExactDistribution exact = exact_enumerate(p, chain.L);

  // salt weight depends on the spins only through (M, Q)
  std::map<std::pair<std::uint64_t, long long>, double> weight;
  long long mismatched = 0;
  for_each_state(p, chain.L, [&](std::uint64_t spins, std::uint64_t salt, double logw) {
    const auto key = std::make_pair(spins, static_cast<long long>(std::popcount(spins & salt)));
    const auto [it, inserted] = weight.emplace(key, logw);
    if (!inserted && it->second != logw) ++mismatched;
  });
  checks.push_back(check("equal-weight salt configurations", mismatched == 0, static_cast<double>(mismatched), 0.0));

  const auto cond = conditional_given_m(exact);
  const auto ising = ising_conditional_given_m(p.J, chain.L, p.d, p.bc);
  double maxDiff = 0.0;
  for (std::size_t s = 0; s < cond.size(); ++s) maxDiff = std::max(maxDiff, std::abs(cond[s] - ising[s]));
  checks.push_back(check("conditional law given M is Ising", maxDiff <= 1e-12, maxDiff, 1e-12));

  CounterRng rng(chain.seed, 0xfeed);
  double maxGap = 0.0;
  const int cases = cfg.at("random_cases").get<int>();
  for (int i = 0; i < cases; ++i) {
    const double m = -0.99 + 1.98 * rng.uniform();
    const double c = 1e-4 + 0.98 * rng.uniform();
    const double k = 10.0 * rng.uniform();
    const auto split = optimal_theta(m, c, k);
    const auto q = mole_fractions(m, c, k);
    maxGap = std::max({maxGap, std::abs(split.pPlus - q.qPlus), std::abs(split.pMinus - q.qMinus)});
  }
  checks.push_back(check("inner optimum equals mole fractions", maxGap <= 1e-10, maxGap, 1e-10));

  const SampleStats stats = run_chain(chain);
  const double tv = total_variation(normalise(stats), exact.jointMQ);
  checks.push_back(check("chain joint (M,Q) law vs exact", tv <= 0.01, tv, 0.01));

  if (p.kappa == 0.0) {
    // without repulsion E[Q | M] = N (n + M) / 2n
    std::map<long long, std::pair<double, double>> byM;
    for (const auto& [key, pr] : exact.jointMQ) {
      byM[key.first].first += pr;
      byM[key.first].second += pr * static_cast<double>(key.second);
    }
    const double n = static_cast<double>(exact.sites), N = static_cast<double>(exact.saltCount);
    double coupling = 0.0;
    for (const auto& [M, acc] : byM)
      if (acc.first > 0) coupling = std::max(coupling, std::abs(acc.second / acc.first - N * (n + M) / (2 * n)));
    checks.push_back(check("exact salt-spin coupling is null", coupling <= 1e-12, coupling, 1e-12));
    if (stats.saltCount > 0 && stats.saltCount < stats.sites) {
      const double gap = std::abs(stats.occPlus.mean - stats.occMinus.mean);
      const double tol = 3.0 * std::hypot(stats.occPlus.stdErr, stats.occMinus.stdErr);
      checks.push_back(check("sampled salt-spin coupling is null", gap <= tol, gap, tol));
    }
  }

  bool pass = true;
  for (const auto& c : checks) pass = pass && c["pass"].get<bool>();
  nlohmann::json report{{"pass", pass}, {"L", chain.L}, {"samples", stats.samples}, {"checks", checks}};
  ctx.emit(dump(report));
  if (!pass) {
    ctx.err << "brine validate: FAIL\n";
    for (const auto& c : checks)
      if (!c["pass"].get<bool>())
        ctx.err << fmt::format("  {}: {} (tolerance {})\n", c["name"].get<std::string>(),
                               format_double(c["value"].get<double>()), format_double(c["tolerance"].get<double>()));
  }
  return pass ? 0 : 1;
}

int cmd_free_energy(Context& ctx) {
  const auto model = make_model(ctx.config);
  const int grid = ctx.config.at("grid").get<int>();
  if (grid < 2) throw ValidationError("grid must be at least 2");
  std::ostringstream csv;
  write_csv(csv, tabulate(*model, grid));
  ctx.emit(csv.str());
  return 0;
}

}  // namespace brine::cli
