#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace l2gap {

enum class ErrorCode {
  NotStochastic,
  NotIrreducible,
  ZeroMassState,
  SingularSystem,
  StepOverflow,
  InvalidSubset,
  StateSpaceTooLarge,
  EmptyFamily,
  NotReversible,
  NoConvergence,
  NotMeanZero,
  DomainError,
  BadParams,
  ParseError,
  DimensionMismatch,
  ValidationError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace l2gap
