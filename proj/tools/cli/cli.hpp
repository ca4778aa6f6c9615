#pragma once

#include <iosfwd>

namespace rankone::cli {

enum ExitCode { Success = 0, Validation = 2, OrbitEscape = 3, Internal = 4 };

/// Full command-line entry point; output goes to `out` unless --out is given.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rankone::cli
