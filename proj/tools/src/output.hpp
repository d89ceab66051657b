#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "brine/lattice.hpp"
#include "brine/variational.hpp"

namespace brine::cli {

/// Floats are written with 17 significant digits, non-finite values as null.
void write_json(std::ostream& out, const nlohmann::json& j, int indent = 2);
std::string format_double(double v);

nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const SampleStats& s);
nlohmann::json to_json(const VariationalSolution& s);

void write_phase_csv(std::ostream& out, const PhaseBoundary& b);
void write_trace_csv(std::ostream& out, const SampleStats& s);

/// Phase-separation band between h_-(c) and h_+(c) as a standalone SVG.
void write_phase_svg(std::ostream& out, const PhaseBoundary& b, double J, double kappa);

}  // namespace brine::cli
