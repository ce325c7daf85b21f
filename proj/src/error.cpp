#include "sigmaridge/error.hpp"

namespace sigmaridge {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::InvalidBasis: return "InvalidBasis";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::AssumptionViolation: return "AssumptionViolation";
    case ErrorCode::DegeneratePath: return "DegeneratePath";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace sigmaridge
