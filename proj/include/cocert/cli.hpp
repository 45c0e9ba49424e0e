#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cocert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotFound = 1;  // also REJECT
inline constexpr int kExitStructural = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand (compile, analyze, certify, verify, oracle). `args` excludes
/// the program name. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cocert::cli
