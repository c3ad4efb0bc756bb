#include "midnav/error.hpp"

namespace midnav {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoActionFound: return "NoActionFound";
        case ErrorCode::MagnitudeOutOfRange: return "MagnitudeOutOfRange";
        case ErrorCode::MissingMagnitude: return "MissingMagnitude";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::GenerationFailed: return "GenerationFailed";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::Unreachable: return "Unreachable";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::LayoutMismatch: return "LayoutMismatch";
        case ErrorCode::DimsMismatch: return "DimsMismatch";
        case ErrorCode::PoseOutsideScene: return "PoseOutsideScene";
        case ErrorCode::DegenerateTrajectory: return "DegenerateTrajectory";
        case ErrorCode::DegenerateEpisode: return "DegenerateEpisode";
        case ErrorCode::EmptyPath: return "EmptyPath";
        case ErrorCode::EmptyTrace: return "EmptyTrace";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::AgentError: return "AgentError";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::TransportError: return "TransportError";
        case ErrorCode::BadResponse: return "BadResponse";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::PortInUse: return "PortInUse";
        case ErrorCode::UsageError: return "UsageError";
    }
    return "UnknownError";
}

}  // namespace midnav
