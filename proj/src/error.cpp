// SPDX-License-Identifier: Apache-2.0
#include "auric/error.hpp"

namespace auric {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedLine: return "malformed_line";
        case ErrorCode::UnknownKind: return "unknown_kind";
        case ErrorCode::BadEmbedding: return "bad_embedding";
        case ErrorCode::NegativeTimestamp: return "negative_timestamp";
        case ErrorCode::NotAppScoped: return "not_app_scoped";
        case ErrorCode::InvalidStream: return "invalid_stream";
        case ErrorCode::ProfileDimensionMismatch: return "profile_dimension_mismatch";
        case ErrorCode::DimensionMismatch: return "dimension_mismatch";
        case ErrorCode::WrongPortraitCount: return "wrong_portrait_count";
        case ErrorCode::ProviderFailure: return "provider_failure";
        case ErrorCode::InvalidConfig: return "invalid_config";
        case ErrorCode::DuplicateSession: return "duplicate_session";
        case ErrorCode::NotFound: return "not_found";
        case ErrorCode::IoFailure: return "io_failure";
        case ErrorCode::UnknownScenario: return "unknown_scenario";
        case ErrorCode::ProfileMismatch: return "profile_mismatch";
        case ErrorCode::MissingProfile: return "missing_profile";
    }
    return "unknown";
}

}  // namespace auric
