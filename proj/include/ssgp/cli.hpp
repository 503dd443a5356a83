#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ssgp {

enum ExitCode : int { kOk = 0, kCheckFailure = 1, kUsageError = 2, kInsufficientBudget = 3 };

/// Runs one command. `args` excludes the program name. JSON results go to
/// `out`; diagnostics and timings go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssgp
