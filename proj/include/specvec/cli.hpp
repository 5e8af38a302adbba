#pragma once

#include <iosfwd>

namespace specvec {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitIndeterminate = 2,  // report emitted, some cells undetermined
};

/// Entry point of the `specvec` command line tool. Reports go to `out`
/// (or the --json path), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace specvec
