#pragma once

#include <stdexcept>
#include <string>

namespace tcc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed inputs, or violated preconditions.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a transform, e.g. Re z >= r_max.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Matrix spectrum incompatible with the requested matrix function.
class SpectralError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Quadrature, iteration, or integration failed to reach tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Ill-conditioned linear solve inside an ODE solver.
class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, double s) : NumericalError(what), s_(s) {}
  double s() const noexcept { return s_; }

 private:
  double s_;
};

/// NaN or overflow during integration; s is where it was detected.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, double s) : NumericalError(what), s_(s) {}
  double s() const noexcept { return s_; }

 private:
  double s_;
};

}  // namespace tcc
