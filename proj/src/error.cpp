#include "maxent/error.hpp"

namespace maxent {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotNormalized: return "NotNormalized";
    case ErrorKind::kNegativeEntry: return "NegativeEntry";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kTooManyFeatures: return "TooManyFeatures";
    case ErrorKind::kEmptySample: return "EmptySample";
    case ErrorKind::kNonConvergence: return "NonConvergence";
    case ErrorKind::kRejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kInvariantViolation: return "InvariantViolation";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kUnknownKey: return "UnknownKey";
    case ErrorKind::kRangeError: return "RangeError";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace maxent
