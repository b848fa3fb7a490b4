#pragma once

#include <iosfwd>

namespace qgdirac {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_validation = 1,  ///< bad flags or parameters outside their ranges
    exit_solver = 2,      ///< a solve did not converge (or converged to something unusable)
    exit_io = 3,          ///< unreadable input or unwritable output
};

/// Entry point of the `qgdirac` tool; subcommands solve-nls, solve-nlde,
/// spectrum, limit-sweep and check-nonlinearity.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qgdirac
