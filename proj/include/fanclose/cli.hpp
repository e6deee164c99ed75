#pragma once

#include <iosfwd>

namespace fc {

// Full command line contract; returns the process exit code.
// Machine output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fc
