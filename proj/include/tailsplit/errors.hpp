#pragma once

#include <stdexcept>
#include <string>

namespace tailsplit {

// Invalid parameters or arguments outside an operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A regime was asked to work with a model outside its alpha range.
class RegimeError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Quadrature or root finding did not reach its tolerance. The best
// estimate and its error bound are kept so callers can still report them.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

// An expectation or transform that is infinite for the given parameters,
// e.g. q_r at an argument below -rate for a Gamma mixing law.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace tailsplit
