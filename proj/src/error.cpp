#include "crossdyn/error.hpp"

namespace crossdyn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::NoAttractorFound: return "NoAttractorFound";
    case ErrorCode::EmptyRow: return "EmptyRow";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::EmptyCohort: return "EmptyCohort";
    case ErrorCode::DegenerateScale: return "DegenerateScale";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BoundaryOptimum: return "BoundaryOptimum";
  }
  return "Unknown";
}

}  // namespace crossdyn
