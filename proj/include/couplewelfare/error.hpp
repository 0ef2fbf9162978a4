#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace couplewelfare {

enum class ErrorCode {
  InvalidArgument = 2,
  ConfigParse = 3,
  MissingInput = 4,
  SchemaViolation = 5,
  DivisionByZero = 10,
  DenominatorUnderflow = 11,
  NoVariation = 12,
  Collinear = 13,
  NoConvergence = 14,
  SingularSystem = 15,
  IoFailure = 20,
};

// Stable identifier used in machine-readable CLI diagnostics.
constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::ConfigParse: return "config_parse";
    case ErrorCode::MissingInput: return "missing_input";
    case ErrorCode::SchemaViolation: return "schema_violation";
    case ErrorCode::DivisionByZero: return "division_by_zero";
    case ErrorCode::DenominatorUnderflow: return "denominator_underflow";
    case ErrorCode::NoVariation: return "no_variation";
    case ErrorCode::Collinear: return "collinear";
    case ErrorCode::NoConvergence: return "no_convergence";
    case ErrorCode::SingularSystem: return "singular_system";
    case ErrorCode::IoFailure: return "io_failure";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace couplewelfare
