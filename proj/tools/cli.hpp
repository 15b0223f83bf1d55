#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hardcore::cli {

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;   // bad input, or a --check that failed
inline constexpr int kBudget = 2;       // resource budget exceeded
inline constexpr int kConvergence = 3;  // iterative method did not converge

inline constexpr int kSchemaVersion = 1;

/// Runs one command line (args excludes the program name). Primary output goes
/// to `out` unless --out names a file; diagnostics, --check verdicts and
/// machine-readable errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hardcore::cli
