#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace casim::cli {

/// Exit statuses of `casim`.
inline constexpr int kSimulates = 0;
inline constexpr int kFails = 1;
inline constexpr int kUsageError = 2;

/// Runs one command. `args` excludes the program name. Reports go to `out`
/// (or the --out-path file); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace casim::cli
