#pragma once

#include <stdexcept>
#include <string>

namespace pshsym {

enum class ErrorCode {
  SchemaError,
  SymmetryViolation,
  NotPshProfile,
  OutOfDomain,
  ToleranceNotMet,
  GridTooCoarse,
  ConvexityViolation,
  SymmetryRequired,
  SinglePoleRequired,
  NumericalGradientUnstable,
  InvalidArgument,
  UnknownName,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying one of the domain error codes. The message holds the
/// witness data (points, triples, magnitudes) when the error has one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SchemaError: return "SCHEMA_ERROR";
    case ErrorCode::SymmetryViolation: return "SYMMETRY_VIOLATION";
    case ErrorCode::NotPshProfile: return "NOT_PSH_PROFILE";
    case ErrorCode::OutOfDomain: return "OUT_OF_DOMAIN";
    case ErrorCode::ToleranceNotMet: return "TOLERANCE_NOT_MET";
    case ErrorCode::GridTooCoarse: return "GRID_TOO_COARSE";
    case ErrorCode::ConvexityViolation: return "CONVEXITY_VIOLATION";
    case ErrorCode::SymmetryRequired: return "SYMMETRY_REQUIRED";
    case ErrorCode::SinglePoleRequired: return "SINGLE_POLE_REQUIRED";
    case ErrorCode::NumericalGradientUnstable: return "NUMERICAL_GRADIENT_UNSTABLE";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::UnknownName: return "UNKNOWN_NAME";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace pshsym
