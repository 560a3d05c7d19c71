#pragma once

#include <iosfwd>

namespace sirsat::cli {

/// Runs the command-line interface. Returns the process exit code:
/// 0 success, 1 numeric or detection failure (including unmet scenario
/// checkpoints), 2 usage or input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sirsat::cli
