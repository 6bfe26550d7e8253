#include "latcover/error.hpp"

namespace latcover {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::EnumerationBudgetExceeded: return "EnumerationBudgetExceeded";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::DensityOutOfRange: return "DensityOutOfRange";
    case ErrorCode::InfeasibleDimensions: return "InfeasibleDimensions";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::BisectionStalled: return "BisectionStalled";
    case ErrorCode::NotALatticePoint: return "NotALatticePoint";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::MaxTriesExceeded: return "MaxTriesExceeded";
    case ErrorCode::CoverageCheckFailed: return "CoverageCheckFailed";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
  }
  return "Unknown";
}

}  // namespace latcover
