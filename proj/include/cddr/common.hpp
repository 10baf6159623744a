#pragma once

#include <stdexcept>
#include <string>

namespace cddr {

/// Error type thrown by every module for invalid inputs, shape mismatches,
/// guard violations and I/O problems.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

} // namespace cddr
