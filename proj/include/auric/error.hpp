// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace auric {

enum class ErrorCode {
    MalformedLine,
    UnknownKind,
    BadEmbedding,
    NegativeTimestamp,
    NotAppScoped,
    InvalidStream,
    ProfileDimensionMismatch,
    DimensionMismatch,
    WrongPortraitCount,
    ProviderFailure,
    InvalidConfig,
    DuplicateSession,
    NotFound,
    IoFailure,
    UnknownScenario,
    ProfileMismatch,
    MissingProfile,
};

/// Stable snake_case name used in CLI output and API error bodies.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace auric
