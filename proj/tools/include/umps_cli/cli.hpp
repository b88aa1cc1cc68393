#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace umps::cli {

enum ExitCode : int { ok = 0, usage_or_io = 1, not_converged = 2 };

/// Runs the `umps` command line with `args` excluding the program name.
/// Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace umps::cli
