#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pursuit {

// Exit codes by error category. Usage errors are always 2.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitValidation = 4,
  kExitIo = 5,
  kExitInvariant = 6,
  kExitDomain = 7,
};

// Entry point of the `pursuit` tool. args[0] is the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

}  // namespace pursuit
