#pragma once

namespace mengerlab::cli {

// Entry point of the command-line tool. Returns 0 on success, 1 on usage
// errors (with usage text on stderr) and 2 on computation errors (with a
// machine-readable JSON error on stderr).
int run(int argc, const char* const* argv);

}  // namespace mengerlab::cli
