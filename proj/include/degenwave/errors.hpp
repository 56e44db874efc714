#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace degenwave {

enum class ErrorCode {
  // input / validation
  DomainError,
  NonIntegrableDrift,
  NonDifferentiable,
  HypothesisViolation,
  UnknownPreset,
  UnknownKey,
  MissingKey,
  RangeError,
  ParseError,
  EmptyWindow,
  NonPositiveEnergy,
  TooLarge,
  // numerical failures
  SingularSystem,
  NearSingular,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by bad input (CLI exit status 1); false for
/// numerical or I/O failures (exit status 2).
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace degenwave
