#pragma once

#include <stdexcept>
#include <string>

namespace hilfer {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computed quantity left the representable range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Two splines that must share a knot collection (or order) do not.
class MismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver produced NaN or infinity.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Picard iteration hit its cap on some knot.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, std::size_t knot, double factor)
      : std::runtime_error(what), knot_(knot), factor_(factor) {}

  std::size_t knot() const noexcept { return knot_; }
  double contraction_factor() const noexcept { return factor_; }

 private:
  std::size_t knot_;
  double factor_;
};

}  // namespace hilfer
