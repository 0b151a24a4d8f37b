#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seqinfo::cli {

/// Exit codes of the `seqinfo` command.
enum ExitCode : int {
    kSuccess = 0,
    kVerificationFailed = 1,
    kInvalidInput = 2,
    kIoFailure = 3,
};

/// Runs `seqinfo <subcommand> [flags]`; `args` excludes the program name.
/// Reports go to `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqinfo::cli
