#include "quadromech/errors.hpp"

namespace quadromech {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidTruncation: return "INVALID_TRUNCATION";
    case ErrorCode::Shape: return "SHAPE_MISMATCH";
    case ErrorCode::Type: return "TYPE_MISMATCH";
    case ErrorCode::InvalidRate: return "INVALID_RATE";
    case ErrorCode::Domain: return "DOMAIN_ERROR";
    case ErrorCode::Degeneracy: return "DEGENERATE_STEADY_STATE";
    case ErrorCode::UndefinedCorrelation: return "UNDEFINED_CORRELATION";
    case ErrorCode::TruncationDivergence: return "TRUNCATION_DIVERGENCE";
    case ErrorCode::Singularity: return "SINGULAR_SYSTEM";
    case ErrorCode::InvalidSpec: return "INVALID_SPEC";
    case ErrorCode::ConfigNotFound: return "CONFIG_NOT_FOUND";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::Io: return "IO_ERROR";
    case ErrorCode::Internal: return "INTERNAL_ERROR";
  }
  return "UNKNOWN";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidTruncation:
    case ErrorCode::Shape:
    case ErrorCode::Type:
    case ErrorCode::InvalidRate:
    case ErrorCode::Domain:
    case ErrorCode::InvalidSpec:
    case ErrorCode::ConfigNotFound:
    case ErrorCode::ConfigInvalid:
      return true;
    default:
      return false;
  }
}

}  // namespace quadromech
