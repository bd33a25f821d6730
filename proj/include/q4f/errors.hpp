#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace q4f {

enum class ErrorCode {
  InvalidDimension,
  ShapeMismatch,
  NegativeContribution,
  InvalidArgument,
  DegenerateModel,
  InvalidIndex,
  UnsupportedExponent,
  UnsupportedMoment,
  SingularMarginal,
  NoPositiveOptimum,
  SolverFailure,
  SingularFOC,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NegativeContribution: return "NegativeContribution";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateModel: return "DegenerateModel";
    case ErrorCode::InvalidIndex: return "InvalidIndex";
    case ErrorCode::UnsupportedExponent: return "UnsupportedExponent";
    case ErrorCode::UnsupportedMoment: return "UnsupportedMoment";
    case ErrorCode::SingularMarginal: return "SingularMarginal";
    case ErrorCode::NoPositiveOptimum: return "NoPositiveOptimum";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::SingularFOC: return "SingularFOC";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace q4f
