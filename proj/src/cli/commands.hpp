#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twinbeam::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRegression = 3;

/// Parse and dispatch one CLI invocation (args exclude the program name).
/// All numerics live in the library; this layer only formats and reports.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace twinbeam::cli
