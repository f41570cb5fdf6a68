#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace examine::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;     // bad flags, invalid input, format errors
inline constexpr int kNumericalError = 2; // internal numerical failure

// Runs the command line `args` (args[0] is the program name). Results go to
// `out`; diagnostics and usage text go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace examine::cli
