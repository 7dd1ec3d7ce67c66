#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ong {

// Exit codes: 0 success, 1 usage error, 2 data error, 3 training divergence.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace ong
