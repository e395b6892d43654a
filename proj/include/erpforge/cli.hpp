#pragma once

#include <string>
#include <vector>

namespace erpforge {

// Command-line entry point. Exit codes: 0 success, 1 data error, 2 usage
// error. --seed falls back to the ERPFORGE_SEED environment variable; an
// explicit flag wins.
int run_cli(const std::vector<std::string>& args);

}  // namespace erpforge
