#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mnsbm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

inline constexpr const char* kVersion = "1.0.0";

// Runs the command line `args` (args[0] is the program name) and returns
// the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mnsbm::cli
