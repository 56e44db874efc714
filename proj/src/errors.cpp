#include "degenwave/errors.hpp"

namespace degenwave {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonIntegrableDrift: return "NonIntegrableDrift";
    case ErrorCode::NonDifferentiable: return "NonDifferentiable";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NonPositiveEnergy: return "NonPositiveEnergy";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SingularSystem:
    case ErrorCode::NearSingular:
    case ErrorCode::IoError:
      return false;
    default:
      return true;
  }
}

}  // namespace degenwave
