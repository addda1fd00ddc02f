#pragma once

#include <stdexcept>
#include <string>

namespace arcsnake {

/// Invalid configuration or arguments: bad sizes, non-finite values,
/// violated preconditions. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// Numerical failure inside an otherwise valid computation
/// (rack overdraw, non-convergence). The CLI maps this to exit code 2.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// A rack has been fed past a geometric limit: a sideline or segment
/// centerline length would become non-positive.
class RackOverdrawError : public NumericError {
  public:
    explicit RackOverdrawError(const std::string& what_arg) : NumericError(what_arg) {}
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

}  // namespace detail

}  // namespace arcsnake
