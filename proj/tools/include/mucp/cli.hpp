#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mucp::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kNegative = 1;
inline constexpr int kUsage = 2;
inline constexpr int kFuelExhausted = 3;
inline constexpr int kInternal = 4;
}  // namespace exit_code

/// Runs the command line `args` (without the program name), writing results
/// to `out` and diagnostics to `err`. With --json everything goes to `out`
/// as one document. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mucp::cli
