#include "kst/error.hpp"

namespace kst {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateBandwidth: return "DegenerateBandwidth";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::InfeasibleNu: return "InfeasibleNu";
    case ErrorCode::SolverDidNotConverge: return "SolverDidNotConverge";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace kst
