#pragma once

namespace citegraph::cli {

// Exit codes: 0 success, 2 usage error, 3 input error, 4 internal
// invariant violation.
int run(int argc, const char* const* argv);

}  // namespace citegraph::cli
