// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ranconv {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands disagree on shape or atom space, or construction data is invalid.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Operator parameters violate their side conditions (kernel membership,
/// positivity, nonsingularity).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A conclusion that is guaranteed under the operation's precondition failed
/// on concrete data. The verification harness treats this as a failing trial.
class TheoremViolationError : public Error {
 public:
  using Error::Error;
};

/// A probed black-box operator is not of the characterized class. Carries a
/// serialized witness probe so the rejection is reproducible.
class CharacterizationViolationError : public Error {
 public:
  CharacterizationViolationError(const std::string& what, std::string witness)
      : Error(what), witness_(std::move(witness)) {}
  const std::string& witness() const { return witness_; }

 private:
  std::string witness_;
};

/// The requested transformation is not defined for this representation.
class UnsupportedRepresentationError : public Error {
 public:
  using Error::Error;
};

/// A numerical subproblem (an LP solve) failed while evaluating a function.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Invalid scenario or command-line configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ranconv
