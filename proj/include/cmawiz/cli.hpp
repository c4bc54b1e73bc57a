#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cmawiz {

/// Entry point of the `cmawizard` tool. Exit codes: 0 success, 1 invalid
/// configuration or runtime failure (single-line diagnostic), 2 usage error.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmawiz
