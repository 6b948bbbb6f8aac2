#pragma once

#include <stdexcept>
#include <string>

namespace citegraph {

// Bad user-supplied data or missing files. The CLI maps this to exit code 3;
// anything else escaping a subcommand is an internal invariant violation (4).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace citegraph
