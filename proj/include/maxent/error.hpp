#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maxent {

enum class ErrorKind {
  kNotNormalized,
  kNegativeEntry,
  kDimensionMismatch,
  kTooManyFeatures,
  kEmptySample,
  kNonConvergence,
  kRejectionBudgetExceeded,
  kInvalidArgument,
  kInvariantViolation,
  kParseError,
  kUnknownKey,
  kRangeError,
  kIoError,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the whole lab; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by solvers whose contract is all-or-nothing. Carries the gradient
// residual at the point the iteration budget ran out.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, double residual)
      : Error(ErrorKind::kNonConvergence, message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace maxent
