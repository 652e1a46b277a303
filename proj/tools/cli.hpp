#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fbst::cli {

/// Exit codes of `fbst`.
enum ExitCode : int {
  kOk = 0,
  kError = 1,          // unreadable input or a computational domain error
  kUsage = 2,          // bad flags or an invalid CiTestSpec
  kBelowThreshold = 3  // --threshold given and the composite evidence fell below it
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fbst::cli
