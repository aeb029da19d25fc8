#pragma once

#include <string>
#include <vector>

namespace obstacle {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

/// Entry point of the obstacle_cli tool. `args` excludes the program name.
int cli_main(const std::vector<std::string>& args);

} // namespace obstacle
