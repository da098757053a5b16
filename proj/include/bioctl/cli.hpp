#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bioctl {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    /// Domain, precondition or verdict failure.
    kExitDomain = 1,
    /// Usage or parse failure.
    kExitUsage = 2,
};

/// Entry point of the `bioctl` executable; args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bioctl
