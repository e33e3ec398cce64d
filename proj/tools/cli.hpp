#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace casimir::cli {

enum ExitCode : int { ok = 0, internal_error = 1, config_error = 2, convergence_error = 3, no_crossing = 4 };

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// FNV-1a 64-bit hash of `text`, as 16 hex digits.
std::string fnv1a64(const std::string& text);

}  // namespace casimir::cli
