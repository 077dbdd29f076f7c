#pragma once

#include <iosfwd>

namespace cubeval::cli {

// Exit codes: 0 success, 1 verify-all failure, 2 invalid input, 3 capacity.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cubeval::cli
