#pragma once

#include <stdexcept>
#include <string>

namespace torsionlab {

// Base for all library errors. The CLI maps `ValidationError` to exit code 2
// and `InconclusiveError` to exit code 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};

struct NonTerminatingSeries : Error {
  using Error::Error;
};

struct NonConstantJacobian : ValidationError {
  using ValidationError::ValidationError;
};

struct BudgetExceeded : Error {
  using Error::Error;
};

struct NotASubalgebra : ValidationError {
  using ValidationError::ValidationError;
};

struct DependentBracket : Error {
  using Error::Error;
};

struct SingularAtOrigin : Error {
  using Error::Error;
};

struct InconclusiveError : Error {
  using Error::Error;
};

struct RootIsolationFailure : InconclusiveError {
  using InconclusiveError::InconclusiveError;
};

struct HypothesisNotMet : InconclusiveError {
  using InconclusiveError::InconclusiveError;
};

}  // namespace torsionlab
