#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stwt {

enum ExitCode : int {
  kExitOk = 0,
  kExitFatal = 1,
  kExitUsage = 2,
  /// Degenerate result (empty cohort, divergent EFPT) under --strict.
  kExitDegenerate = 3,
};

/// Runs the command line; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stwt
