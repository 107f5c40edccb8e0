#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mwrecon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the executable; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace mwrecon::cli
