#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kst::cli {

inline constexpr int kExitSame = 0;
inline constexpr int kExitDifferent = 1;
inline constexpr int kExitError = 2;

/// Runs the command line `kst <args...>` (args excludes the program name).
/// Returns the process exit code: 0/1 for test outcomes or success, 2 on
/// any error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kst::cli
