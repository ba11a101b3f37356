#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace regulattice {

/// Command-line entry point. `args` excludes the program name. Returns 0 on
/// a regular partition, 2 on a quota shortfall or iteration cap, 1 on bad
/// input.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace regulattice
