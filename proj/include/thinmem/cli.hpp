#pragma once

#include <string>
#include <vector>

namespace thinmem {

// Entry point of the command-line tool; returns the process exit code
// (0 success, 1 parameter/usage error, 2 failed internal assertion).
int run_cli(const std::vector<std::string>& args);

}  // namespace thinmem
