#pragma once

#include <iosfwd>

namespace ftc::app {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3 };

/// Parses `argv` (argv[0] is the program name) and runs one subcommand:
/// field, curves, segment, alpha, bench.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ftc::app
