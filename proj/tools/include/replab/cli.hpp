#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace replab::cli {

/// Process exit codes; stable for scripting.
enum ExitCode : int {
    kSuccess = 0,
    kInputError = 1,
    kAdvisory = 2,
    kVerificationFailed = 3,
};

/// Runs one command line. Data goes to `out` (or --out), tables and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace replab::cli
