#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pedsched::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,     // I/O or internal error
  kValidation = 2,  // bad flags, bad scenario, bad geometry
  kGuard = 3,       // solver guard or unhappiness saturation
};

/// Entry point of the pedsched executable.
int run(int argc, char** argv);

/// Same, with explicit arguments (program name excluded) and streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pedsched::cli
