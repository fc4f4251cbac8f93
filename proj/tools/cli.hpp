#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ballnls::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kRuntime = 3, kAssertion = 4 };

/// Runs the command line `args` (args[0] is the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ballnls::cli
