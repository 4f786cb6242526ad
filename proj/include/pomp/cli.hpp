#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pomp::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kProviderError = 4,
  kInternalError = 5,
};

// Runs the `pomp` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pomp::cli
