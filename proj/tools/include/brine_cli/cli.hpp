#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brine::cli {

enum ExitCode : int {
  kSuccess = 0,
  kCheckFailed = 1,
  kInvalid = 2,
  kNonUnique = 3,
  kInfeasible = 4,
};

/// Runs `brine <args...>` in-process. Primary output goes to `out` unless an
/// output path is given; diagnostics and, without an output path, the run
/// manifest go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace brine::cli
