#pragma once

#include <iosfwd>

namespace quiverhk::cli {

// Entry point shared by the executable and the tests.  Returns the process exit
// code: 0 success, 1 verification or solver failure, 2 input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quiverhk::cli
