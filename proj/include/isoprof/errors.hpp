#pragma once

#include <stdexcept>
#include <string>

namespace isoprof {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition (e.g. a validity threshold) was not met.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of an iterative numerical method.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, double achieved_rel_error)
      : NumericError(what), achieved_(achieved_rel_error) {}
  double achieved_rel_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class RootFindingError : public NumericError {
 public:
  RootFindingError(const std::string& what, double lo, double hi)
      : NumericError(what), lo_(lo), hi_(hi) {}
  double bracket_lo() const noexcept { return lo_; }
  double bracket_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Raised when the inverse of an apparently bounded potential is requested.
class UnboundedInverseError : public NumericError {
 public:
  using NumericError::NumericError;
};

class FitError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace isoprof
