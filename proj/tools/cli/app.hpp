#pragma once

#include <ostream>

namespace needles::cli {

/// Whole command line in, exit code out: 0 success, 1 invalid input or I/O
/// failure, 2 numerical failure.
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace needles::cli
