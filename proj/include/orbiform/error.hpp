#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orbiform {

enum class ErrorCode {
  InvalidTerm,
  ConditionViolated,
  QuadratureFailure,
  RadiusTooSmall,
  RadiusBelowFeasible,
  PoleArgument,
  BracketFailure,
  EmptyBody,
  OriginOutside,
  ParseError,
  SchemaError,
  IoError,
  Usage,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidTerm: return "InvalidTerm";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::RadiusTooSmall: return "RadiusTooSmall";
    case ErrorCode::RadiusBelowFeasible: return "RadiusBelowFeasible";
    case ErrorCode::PoleArgument: return "PoleArgument";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::EmptyBody: return "EmptyBody";
    case ErrorCode::OriginOutside: return "OriginOutside";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace orbiform
