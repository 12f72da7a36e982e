#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace onehop::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kNotConverged = 2,
  kReproductionMismatch = 3,
  kPropertyFailure = 4,
};

/// Parses argv (argv[0] is the program name) and runs one subcommand:
/// solve, table1 or check.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace onehop::cli
