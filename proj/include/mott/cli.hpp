#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mott/output.hpp"

namespace mott {

// Parses argv, runs one subcommand, writes results. Exit status: 0 success,
// 1 computation error, 2 usage error. `bundle` (optional) receives the result.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                ResultBundle* bundle = nullptr);

}  // namespace mott
