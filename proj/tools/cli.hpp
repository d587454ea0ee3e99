#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mebd::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kBadArguments = 2;
inline constexpr int kNumericalFailure = 3;
inline constexpr int kCalibrationFailure = 4;

/// Runs one command line (args excludes the program name). Data goes to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mebd::cli
