#pragma once

#include <iosfwd>

namespace pdl {

// Exit codes: 0 success, 1 config or usage error, 2 numerical failure.
int cli_main(int argc, const char* const* argv);
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pdl
