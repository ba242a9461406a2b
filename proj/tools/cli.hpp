#pragma once

#include <iosfwd>

namespace powlmine::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kInputError = 2,
  kFormatError = 3,
  kBudget = 4,
};

/// Runs one command line (argv[0] is the program name) and returns the exit
/// status. Summaries go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace powlmine::cli
