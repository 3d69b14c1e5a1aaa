#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace acstar::cli {

/// Process exit codes.
enum ExitCode : int {
  kFeasible = 0,  // also "pass"
  kPropertyFailure = 1,
  kInputError = 2,
  kInfeasible = 3,
  kUnknown = 4,
  kMethodMismatch = 5,
};

/// Runs one command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace acstar::cli
