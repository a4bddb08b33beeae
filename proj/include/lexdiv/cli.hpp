#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lexdiv {

/// Process exit statuses shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitViolation = 1,
    kExitInput = 2,
    kExitBudget = 3,
};

/// Runs one command line (without the program name). Regular output goes to
/// `out`, diagnostics to `err`. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexdiv
