#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xkm::cli {

/// Exit statuses shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kTerminationCap = 3,
  kGuaranteeFlag = 4,
};

/// Runs `xkm <subcommand> ...`; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xkm::cli
