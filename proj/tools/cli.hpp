#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace latdisc::cli {

/// Runs one command line (without the program name). Returns the exit
/// status: 0 success, 1 validation failure, 2 usage or parse error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace latdisc::cli
