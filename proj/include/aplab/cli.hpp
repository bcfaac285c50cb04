#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace aplab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBudget = 2;

/// Entry point of the `aplab` tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aplab
