#pragma once

#include <string>
#include <vector>

namespace mixw2 {
namespace cli {

/// Run the command-line tool. Returns the process exit code:
/// 0 success, 2 config/schema problems, 3 numeric failures.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace cli
}  // namespace mixw2
