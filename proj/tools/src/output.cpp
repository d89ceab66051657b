#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace brine::cli {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  return fmt::format("{:.17g}", v);
}

namespace {

void write_value(std::ostream& out, const nlohmann::json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << nlohmann::json(it.key()).dump() << ": ";
        write_value(out, it.value(), indent, depth + 1);
      }
      out << "\n" << close << "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      const bool scalars = std::all_of(j.begin(), j.end(), [](const auto& v) { return v.is_primitive(); });
      if (scalars) {
        out << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << ", ";
          write_value(out, j[i], indent, depth + 1);
        }
        out << "]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        write_value(out, j[i], indent, depth + 1);
      }
      out << "\n" << close << "]";
      return;
    }
    default:
      out << j.dump();
  }
}

}  // namespace

void write_json(std::ostream& out, const nlohmann::json& j, int indent) {
  write_value(out, j, indent, 0);
  out << "\n";
}

nlohmann::json to_json(const Estimate& e) { return {{"mean", e.mean}, {"stderr", e.stdErr}}; }

nlohmann::json to_json(const SampleStats& s) {
  nlohmann::json joint = nlohmann::json::array();
  for (const auto& [key, count] : s.jointMQ) joint.push_back({key.first, key.second, count});
  nlohmann::json j{
      {"samples", s.samples},
      {"sites", s.sites},
      {"salt_count", s.saltCount},
      {"concentration", s.concentration},
      {"mean_m", to_json(s.meanM)},
      {"mean_q", to_json(s.meanQ)},
      {"plus_fraction", to_json(s.plusFraction)},
      {"occ_plus", to_json(s.occPlus)},
      {"occ_minus", to_json(s.occMinus)},
      {"odds_ratio", to_json(s.oddsRatio)},
      {"var_m", s.varM},
      {"hist_m", s.histM},
      {"flip_proposals", s.flipProposals},
      {"flip_accepted", s.flipAccepted},
      {"swap_proposals", s.swapProposals},
      {"swap_accepted", s.swapAccepted},
      {"swap_invalid", s.swapInvalid},
  };
  if (!joint.empty()) j["joint_mq"] = joint;
  return j;
}

nlohmann::json to_json(const VariationalSolution& s) {
  return {{"m", s.m},
          {"theta", s.theta},
          {"value", s.value},
          {"q_plus", s.qPlus},
          {"q_minus", s.qMinus},
          {"region", std::string(to_string(s.region))},
          {"droplet_fraction", s.dropletFraction}};
}

void write_phase_csv(std::ostream& out, const PhaseBoundary& b) {
  out << "c,h_minus,h_plus\n";
  for (const auto& r : b.rows)
    out << format_double(r.c) << ',' << format_double(r.hMinus) << ',' << format_double(r.hPlus) << '\n';
}

void write_trace_csv(std::ostream& out, const SampleStats& s) {
  out << "sweep,M,Q\n";
  for (const auto& r : s.trace) out << r.sweep << ',' << r.M << ',' << r.Q << '\n';
}

void write_phase_svg(std::ostream& out, const PhaseBoundary& b, double J, double kappa) {
  constexpr double W = 640, H = 480, left = 80, right = 30, top = 40, bottom = 60;
  double cMin = 0, cMax = 1e-12, hMin = 0, hMax = 0;
  if (!b.rows.empty()) {
    cMin = b.rows.front().c;
    cMax = b.rows.back().c;
  }
  for (const auto& r : b.rows) {
    hMin = std::min(hMin, r.hMinus);
    hMax = std::max(hMax, r.hPlus);
  }
  if (cMax <= cMin) cMax = cMin + 1.0;
  const double span = std::max(hMax - hMin, 1e-12);
  hMin -= 0.05 * span;
  hMax += 0.05 * span;
  auto X = [&](double c) { return left + (c - cMin) / (cMax - cMin) * (W - left - right); };
  auto Y = [&](double h) { return top + (hMax - h) / (hMax - hMin) * (H - top - bottom); };

  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)", W, H, W, H)
      << "\n";
  out << R"(<rect width="100%" height="100%" fill="white"/>)" << "\n";
  out << fmt::format(R"(<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">)"
                     "phase separation band, J={:.6g}, kappa={:.6g}</text>\n",
                     W / 2, J, kappa);

  std::string band;
  for (const auto& r : b.rows) band += fmt::format("{:.3f},{:.3f} ", X(r.c), Y(r.hPlus));
  for (auto it = b.rows.rbegin(); it != b.rows.rend(); ++it) band += fmt::format("{:.3f},{:.3f} ", X(it->c), Y(it->hMinus));
  out << R"(<polygon class="band" fill="#9ecae1" fill-opacity="0.6" stroke="none" points=")" << band << "\"/>\n";

  for (const auto& [name, pick] : {std::pair{"h_plus", true}, std::pair{"h_minus", false}}) {
    std::string pts;
    for (const auto& r : b.rows) pts += fmt::format("{:.3f},{:.3f} ", X(r.c), Y(pick ? r.hPlus : r.hMinus));
    out << fmt::format(R"(<polyline class="{}" fill="none" stroke="#08519c" stroke-width="2" points="{}"/>)", name, pts)
        << "\n";
  }

  // axes and ticks
  out << fmt::format(R"(<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/>)", left, H - bottom, W - right) << "\n";
  out << fmt::format(R"(<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/>)", left, top, H - bottom) << "\n";
  for (int i = 0; i <= 5; ++i) {
    const double c = cMin + (cMax - cMin) * i / 5.0;
    const double h = hMin + (hMax - hMin) * i / 5.0;
    out << fmt::format(R"(<text x="{:.3f}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{:.3g}</text>)",
                       X(c), H - bottom + 18, c)
        << "\n";
    out << fmt::format(R"(<text x="{}" y="{:.3f}" font-family="sans-serif" font-size="11" text-anchor="end">{:.3g}</text>)",
                       left - 6, Y(h) + 4, h)
        << "\n";
  }
  if (hMin < 0 && hMax > 0)
    out << fmt::format(R"(<line x1="{}" y1="{:.3f}" x2="{}" y2="{:.3f}" stroke="gray" stroke-dasharray="4 3"/>)", left,
                       Y(0), W - right, Y(0))
        << "\n";
  out << fmt::format(R"(<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">c</text>)",
                     (left + W - right) / 2, H - 16)
      << "\n";
  out << fmt::format(R"(<text x="18" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" )"
                     R"svg(transform="rotate(-90 18 {})">h</text>)svg",
                     (top + H - bottom) / 2, (top + H - bottom) / 2)
      << "\n";
  out << "</svg>\n";
}

}  // namespace brine::cli
