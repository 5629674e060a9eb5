#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace speeduplab::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kModelError = 3,
  kDataError = 4,
};

/// Runs the command line `args` (without the program name). Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace speeduplab::cli
