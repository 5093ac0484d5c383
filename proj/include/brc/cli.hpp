#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brc {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitInputError = 2, kExitNotConverged = 3 };

/// Runs the `brc` command line. `args[0]` is the program name. Results go to
/// `out` (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace brc
