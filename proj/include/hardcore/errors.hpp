#pragma once

#include <stdexcept>
#include <string>

namespace hardcore {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Invalid input: malformed graph, pinned root, out-of-range parameter.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

/// A configured resource budget (memo entries, tree nodes, enumeration cap)
/// was exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "budget"; }
};

/// An iterative method did not converge within its step cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "convergence"; }
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace detail
}  // namespace hardcore
