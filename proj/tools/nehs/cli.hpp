#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nehs::cli {

// Parses the command line and runs one subcommand. Returns the process exit
// status: 0 on success, 2 for usage errors, 1 for any other failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Same, with `args` excluding the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nehs::cli
