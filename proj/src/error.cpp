#include "numgame/error.hpp"

namespace numgame {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidDomain: return "invalid-domain";
    case ErrorCode::InvalidTarget: return "invalid-target";
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::EmptySupport: return "empty-support";
    case ErrorCode::ZeroEvidence: return "zero-evidence";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::NegativeEntry: return "negative-entry";
    case ErrorCode::NoOverlap: return "no-overlap";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Conflict: return "conflict";
    case ErrorCode::Capacity: return "capacity";
    case ErrorCode::Template: return "template";
    case ErrorCode::Usage: return "usage";
    case ErrorCode::Io: return "io";
    case ErrorCode::Network: return "network";
    case ErrorCode::Auth: return "auth";
    }
    return "unknown";
}

} // namespace numgame
