#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twistfix::cli {

/// Exit codes: 0 when every check passes, 2 when a check fails, 1 on an input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitCheck = 2;

/// Runs one command line (without the program name). Reports go to `out` (or to --out),
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twistfix::cli
