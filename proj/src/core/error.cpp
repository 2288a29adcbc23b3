#include "l2gap/error.hpp"

namespace l2gap {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::ZeroMassState: return "ZeroMassState";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::StepOverflow: return "StepOverflow";
    case ErrorCode::InvalidSubset: return "InvalidSubset";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::EmptyFamily: return "EmptyFamily";
    case ErrorCode::NotReversible: return "NotReversible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotMeanZero: return "NotMeanZero";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace l2gap
