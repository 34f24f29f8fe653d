#pragma once

#include <stdexcept>
#include <string>

namespace contact {

/// Base of every error raised by the library.
class ContactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, out-of-domain parameter, bad config.
class InvalidArgument : public ContactError {
 public:
  using ContactError::ContactError;
};

/// Base for failures that happen while stepping. Integrators catch these and
/// mark the trajectory as diverged instead of propagating.
class NumericalError : public ContactError {
 public:
  using ContactError::ContactError;
};

/// An evaluator returned a non-finite value.
class EvaluationError : public NumericalError {
 public:
  EvaluationError(std::string coordinate, const std::string& what)
      : NumericalError(what + " (coordinate " + coordinate + ")"), coordinate_(std::move(coordinate)) {}

  const std::string& coordinate() const noexcept { return coordinate_; }

 private:
  std::string coordinate_;
};

class NonConvergence : public NumericalError {
 public:
  NonConvergence(const std::string& what, double residual)
      : NumericalError(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DenominatorNearZero : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Model-specific domain violation hit during integration (e.g. y < 0 with a
/// fractional polytropic index).
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CollisionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Error analysis requested on a system without the second-derivative evaluators.
class MissingDerivative : public ContactError {
 public:
  using ContactError::ContactError;
};

}  // namespace contact
