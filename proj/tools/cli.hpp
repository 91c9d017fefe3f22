#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sscl::cli {

/// Exit codes: 0 success, 1 runtime failure (including any failed fold),
/// 2 usage or validation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sscl::cli
