#pragma once

#include <ostream>

namespace provcirc::cli {

/// Exit codes of the command-line tool.
enum Exit : int {
  kOk = 0,
  kUsage = 2,     ///< bad arguments or a builder error
  kMismatch = 3,  ///< verify found different polynomials
  kOracleLimit = 4,
};

/// Runs one command line; output and diagnostics go to the given streams.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace provcirc::cli
