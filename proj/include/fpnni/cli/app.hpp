#pragma once

#include <ostream>

namespace fpnni::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitSolverError = 3,
  kExitIoError = 4,
};

/// Entry point of the `fpnni` tool: simulate, equilibrium, check, mlf and
/// search-q subcommands. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fpnni::cli
