#pragma once

#include <ostream>

namespace fairbayes::cli {

/// Entry point of the `fairbayes` tool. Reports go to `out` (or the --out
/// file), errors to `err` as one JSON object. Returns the process exit code:
/// 0 on success, 1 for a failed run, 2 for bad usage.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fairbayes::cli
