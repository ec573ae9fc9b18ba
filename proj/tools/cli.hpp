#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mifo::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kFailure = 2 };

/// Entry point behind `mifoimpute`. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mifo::cli
