#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace numgame {

enum class ErrorCode {
    InvalidDomain,
    InvalidTarget,
    InvalidConfig,
    EmptySupport,
    ZeroEvidence,
    Shape,
    NegativeEntry,
    NoOverlap,
    Parse,
    Validation,
    Conflict,
    Capacity,
    Template,
    Usage,
    Io,
    Network,
    Auth,
};

/// Coarse failure class; the CLI maps each one to a distinct exit code.
enum class ErrorCategory { Validation, Computation, Io };

constexpr ErrorCategory category_of(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptySupport:
    case ErrorCode::ZeroEvidence:
        return ErrorCategory::Computation;
    case ErrorCode::Io:
    case ErrorCode::Network:
    case ErrorCode::Auth:
        return ErrorCategory::Io;
    default:
        return ErrorCategory::Validation;
    }
}

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] ErrorCategory category() const noexcept { return category_of(code_); }

  private:
    ErrorCode code_;
};

} // namespace numgame
