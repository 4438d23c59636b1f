#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace memkit::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kSolverError = 3,
  kCheckFailure = 4,
};

/// Entry point of the `memkit` executable: run | converge | ml | resolvent-check.
/// args excludes the program name. Printed tables go to out, diagnostics to err.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace memkit::cli
