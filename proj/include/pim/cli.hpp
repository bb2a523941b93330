#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pim {

/// Process exit codes of the `pim` tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    /// Malformed input file, config value or argument.
    exit_input = 2,
    /// Solver failure, failed sweep level or failed oracle check.
    exit_numerical = 3,
    /// Output could not be written.
    exit_io = 4,
};

/// Runs `pim <command> ...` with `args` excluding the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pim
