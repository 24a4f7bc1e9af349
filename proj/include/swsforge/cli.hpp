#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace swsforge::cli {

/// Runs one swsforge command. `args` excludes the program name. Returns the
/// exit code: 0 ok, 1 domain error, 2 input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swsforge::cli
