#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace folreward::cli {

/// Runs the folreward command line. Returns 0 on success, 1 on a usage
/// error and 2 on a data error; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace folreward::cli
