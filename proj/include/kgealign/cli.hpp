#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kgealign {

// Entry point shared by the binary and the tests. Returns the process
// exit code: 0 success, 1 pipeline failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kgealign
