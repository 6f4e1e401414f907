#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace decoh::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitVerification = 4,
};

/// Entry point of the `decoh` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace decoh::cli
