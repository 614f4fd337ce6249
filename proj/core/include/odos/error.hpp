#pragma once

#include <stdexcept>
#include <string>

namespace odos {

enum class ErrorCode {
  InvalidArgument,
  SupportTooLarge,
  MissingHierarchy,
  NonFiniteValue,
  SingularMatrix,
  DimensionMismatch,
  DegenerateWeights,
  SpaceTooLarge,
  Infeasible,
  PoolExhausted,
  InvalidGrid,
  SimulationFailed,
  ParseError,
  ValidationError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::MissingHierarchy: return "MissingHierarchy";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::PoolExhausted: return "PoolExhausted";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::SimulationFailed: return "SimulationFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace odos
