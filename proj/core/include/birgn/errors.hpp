#pragma once

#include <stdexcept>
#include <string>

namespace birgn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A field holds non-finite values or does not match its grid.
class InvalidField : public Error {
 public:
  using Error::Error;
};

/// Two operands live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A parameter violates the forward operator's domain lower bound.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative linear solve did not reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// A Bregman distance came out clearly negative: the supplied subgradient is wrong.
class ConvexityViolation : public Error {
 public:
  using Error::Error;
};

/// The subproblem objective evaluated to a non-finite value.
class DivergedEvaluation : public Error {
 public:
  using Error::Error;
};

/// The dense oracle was asked for a problem outside its quadratic scope.
class UnsupportedOracle : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV or JSON input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace birgn
