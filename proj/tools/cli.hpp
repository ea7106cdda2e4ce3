#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lrcast::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsageError = 2,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lrcast::cli
