#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ldp::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,      // selftest failures and unexpected errors
  kConfig = 2,       // malformed flags, specs or files
  kDomain = 3,       // domain errors and unsupported operations
  kConvergence = 4,  // numerical non-convergence
};

/// Runs the tool on `args` (without the program name). Tables go to `out`
/// unless --output names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ldp::cli
