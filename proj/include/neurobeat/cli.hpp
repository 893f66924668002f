#pragma once

#include <string>
#include <vector>

namespace neurobeat {

// Full command-line entry point. Returns the process exit code:
//   0 success, 1 usage error, 2 data/validation error, 3 I/O or internal
// error. Diagnostics go to stderr.
int run_command(const std::vector<std::string>& args);
int run_command(int argc, const char* const* argv);

}  // namespace neurobeat
