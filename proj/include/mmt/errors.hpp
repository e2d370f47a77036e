#pragma once

#include <stdexcept>
#include <string>

namespace mmt {

// Input data violates a documented precondition or invariant.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file or command-line syntax.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A computation exceeded a configured size ceiling.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Internal: a fixed-width integer fast path overflowed; callers retry with
// arbitrary precision.
struct OverflowError : std::runtime_error {
    OverflowError() : std::runtime_error("int64 overflow") {}
};

} // namespace mmt
