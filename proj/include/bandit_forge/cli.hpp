#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bforge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

/// Runs the command line `args` (without the program name) in process.
/// Exit codes: 0 success, 2 configuration error, 3 unreadable or malformed
/// input data, 1 anything else.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal, independent of the global locale.
std::string format_number(double v);

}  // namespace bforge
