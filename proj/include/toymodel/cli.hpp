#pragma once

#include <ostream>
#include <span>
#include <string>

namespace toymodel {

enum ExitCode : int {
    kExitOk = 0,
    kExitOther = 1,
    kExitUsage = 2,
    kExitNumerical = 3,
    kExitIo = 4,
};

/// Runs one command (`args` excludes the program name), writes its output
/// file and a `.config` sidecar, and prints a one-line summary to `out`.
/// Errors go to `err`; the return value is an ExitCode.
int cli_dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace toymodel
