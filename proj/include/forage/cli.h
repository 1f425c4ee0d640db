#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace forage {

/// Entry point of the `forage` tool. `args` excludes the program name.
/// Subcommands: simulate, train, sweep, analyze, verify.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace forage
