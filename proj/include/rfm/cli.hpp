#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rfm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;

/// Runs the command line `args` (args[0] is the program name). Failures are
/// reported as a single `error: code=<code> message=<text>` line on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfm
