#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qphase {

enum class ErrorCode {
    DegenerateProbe,
    InvalidVector,
    SingularFisher,
    InvalidDirection,
    QuadratureFailure,
    EmptyDomain,
    InsufficientBudget,
    MixedProbe,
    DegenerateMoment,
    EmptySample,
    UndefinedVariance,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          detail_(message) {}

    ErrorCode code() const noexcept { return code_; }
    /// Message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace qphase
