#pragma once

#include <stdexcept>
#include <string>

namespace midnav {

// Machine-readable failure codes surfaced by every module. The CLI maps them
// to single-line JSON on stderr; library users catch midnav::Error.
enum class ErrorCode {
    NoActionFound,
    MagnitudeOutOfRange,
    MissingMagnitude,
    SchemaError,
    ValidationError,
    GenerationFailed,
    OutOfBounds,
    Unreachable,
    DimensionMismatch,
    LayoutMismatch,
    DimsMismatch,
    PoseOutsideScene,
    DegenerateTrajectory,
    DegenerateEpisode,
    EmptyPath,
    EmptyTrace,
    EmptyInput,
    AgentError,
    Timeout,
    TransportError,
    BadResponse,
    IoError,
    PortInUse,
    UsageError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace midnav
