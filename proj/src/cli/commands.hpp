#pragma once

#include <iosfwd>

namespace logcave::cli {

enum ExitCode { kOk = 0, kUsage = 2, kDegenerate = 3, kSolverFailure = 4 };

/// Entry point of the logcave executable. Reports go to `out` unless
/// --output names a file; messages go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace logcave::cli
