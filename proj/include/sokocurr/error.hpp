#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sokocurr {

enum class ErrorCode {
    NoPlayer,
    MultiplePlayers,
    UnknownChar,
    BoxGoalCountMismatch,
    IllegalPush,
    SubsetNotContained,
    SizeMismatch,
    EmptyPool,
    ArmNotSelected,
    ShapeMismatch,
    EmptyBatch,
    NonFiniteGradient,
    ArchMismatch,
    BadCheckpoint,
    RootTerminal,
    NoChildren,
    UnsolvedEpisode,
    EmptyBuffer,
    BadConfig,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NoPlayer: return "NoPlayer";
    case ErrorCode::MultiplePlayers: return "MultiplePlayers";
    case ErrorCode::UnknownChar: return "UnknownChar";
    case ErrorCode::BoxGoalCountMismatch: return "BoxGoalCountMismatch";
    case ErrorCode::IllegalPush: return "IllegalPush";
    case ErrorCode::SubsetNotContained: return "SubsetNotContained";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::ArmNotSelected: return "ArmNotSelected";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::ArchMismatch: return "ArchMismatch";
    case ErrorCode::BadCheckpoint: return "BadCheckpoint";
    case ErrorCode::RootTerminal: return "RootTerminal";
    case ErrorCode::NoChildren: return "NoChildren";
    case ErrorCode::UnsolvedEpisode: return "UnsolvedEpisode";
    case ErrorCode::EmptyBuffer: return "EmptyBuffer";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// All library failures surface as this exception; `code()` identifies the kind.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace sokocurr
