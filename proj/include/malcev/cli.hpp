#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace malcev::cli {

enum ExitCode : int { success = 0, negative = 1, inconclusive = 2, usage_error = 3 };

/// Runs one command. `args` excludes the program name. The machine-readable
/// RESULT/VERDICT line goes to `out`, everything else to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace malcev::cli
