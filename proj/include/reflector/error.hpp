#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace refl {

enum class ErrorKind {
  UnsupportedDimension,
  NumericalEvaluation,
  AxisSingularity,
  ImproperParaboloid,
  DegenerateFocalParameter,
  UnboundedReflector,
  DegenerateReflector,
  InvalidInput,
  DecompositionFailure,
  NotEvaluable,
  UnsupportedCase,
  Orientation,
  InsufficientData,
};

/// Stable kebab-case name, used in CLI diagnostics.
constexpr std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::NumericalEvaluation: return "numerical-evaluation";
    case ErrorKind::AxisSingularity: return "axis-singularity";
    case ErrorKind::ImproperParaboloid: return "improper-paraboloid";
    case ErrorKind::DegenerateFocalParameter: return "degenerate-focal-parameter";
    case ErrorKind::UnboundedReflector: return "unbounded-reflector";
    case ErrorKind::DegenerateReflector: return "degenerate-reflector";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::DecompositionFailure: return "decomposition-failure";
    case ErrorKind::NotEvaluable: return "not-evaluable";
    case ErrorKind::UnsupportedCase: return "unsupported-case";
    case ErrorKind::Orientation: return "orientation";
    case ErrorKind::InsufficientData: return "insufficient-data";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace refl
