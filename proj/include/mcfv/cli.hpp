#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcfv {

/// Command-line entry point. Returns 0 on success, 1 on a configuration
/// error and 2 on a numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcfv
