#pragma once

#include <stdexcept>
#include <string>

namespace yamabe {

/// Invalid input or violated precondition (bad dimensions, negative volume, ...).
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A bisection failed to establish both trajectory classes.
class BracketError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An iteration cap was exceeded before the requested tolerance was met.
class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Requested spectral shift lies outside the admissible range of the linear
/// problem (the constant part of the coefficient must stay below its value at
/// the origin, otherwise the solution does not decrease initially).
class CoefficientPreconditionError : public DomainError {
  public:
    CoefficientPreconditionError(const std::string& what, double admissible_cap)
        : DomainError(what), admissible_cap_(admissible_cap) {}
    double admissible_cap() const { return admissible_cap_; }

  private:
    double admissible_cap_;
};

/// Requested tail integrand does not decay under the profile tail model.
class TailDivergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Profile cache file is missing, malformed, or keyed to other solver settings.
class CacheError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace yamabe
