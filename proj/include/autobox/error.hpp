#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace autobox {

enum class ErrorCode {
    OutOfBounds,
    InvalidArgument,
    NonConvergence,
    InsufficientProposals,
    EmptyCategory,
    ScorerProtocolError,
    EmptyForeground,
    NoOverlap,
    EmptyPatchDb,
    IoFailure,
    ParseError,
    InvariantViolation,
    DuplicatePath,
    ZeroGroundTruth,
    NoGroundTruth,
    PlacementFailure,
    ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InsufficientProposals: return "InsufficientProposals";
    case ErrorCode::EmptyCategory: return "EmptyCategory";
    case ErrorCode::ScorerProtocolError: return "ScorerProtocolError";
    case ErrorCode::EmptyForeground: return "EmptyForeground";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::EmptyPatchDb: return "EmptyPatchDb";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::DuplicatePath: return "DuplicatePath";
    case ErrorCode::ZeroGroundTruth: return "ZeroGroundTruth";
    case ErrorCode::NoGroundTruth: return "NoGroundTruth";
    case ErrorCode::PlacementFailure: return "PlacementFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above, so
/// batch drivers can record it (e.g. as a DROPPED reason) without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace autobox
