#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace esep {

inline constexpr const char* kToolVersion = "1.0.0";

// Exit status: 0 success / all checks pass, 1 violation or falsification
// found, 2 input or usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace esep
