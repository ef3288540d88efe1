#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace taustar::cli {

/// Exit codes: 0 success (verify: pass), 1 verify check failed,
/// 2 usage error, 3 data error, 4 resource guard.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace taustar::cli
