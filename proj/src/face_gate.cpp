// SPDX-License-Identifier: Apache-2.0
#include "auric/face_gate.hpp"

#include "auric/error.hpp"
#include "auric/session_engine.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace auric {

EnrollmentProfile enroll(std::string owner_id, std::span<const Embedding> portraits, Millis created_ts) {
    if (portraits.size() != kPortraitCount) {
        throw Error(ErrorCode::WrongPortraitCount, "enrollment requires exactly 3 portraits, got " +
                                                       std::to_string(portraits.size()));
    }
    const auto dim = portraits[0].size();
    EnrollmentProfile profile{std::move(owner_id), {}, created_ts};
    for (std::size_t i = 0; i < kPortraitCount; ++i) {
        if (portraits[i].size() != dim) {
            throw Error(ErrorCode::BadEmbedding, "portraits must share one dimension");
        }
        if (!is_unit_norm(portraits[i])) {
            throw Error(ErrorCode::BadEmbedding, "portrait " + std::to_string(i + 1) + " is not unit norm");
        }
        profile.portraits[i] = portraits[i];
    }
    return profile;
}

double similarity(std::span<const double> a, std::span<const double> b) noexcept {
    double dot = 0.0;
    const auto n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) dot += a[i] * b[i];
    return std::clamp(dot, 0.0, 1.0);
}

CaptureVerdict classify_sample(const CaptureSample& sample, const EnrollmentProfile& profile) {
    if (!sample.face) return CaptureVerdict::no_face();
    const auto& face = *sample.face;
    if (face.size() != profile.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "sample dimension " + std::to_string(face.size()) +
                                                      " does not match profile dimension " +
                                                      std::to_string(profile.dimension()));
    }
    double best = 0.0;
    for (const auto& portrait : profile.portraits) best = std::max(best, similarity(face, portrait));
    return CaptureVerdict::face(best);
}

Classifier reference_classifier() { return &classify_sample; }

Classifier no_face_classifier() {
    return [](const CaptureSample&, const EnrollmentProfile&) { return CaptureVerdict::no_face(); };
}

std::string_view to_string(Aggregation agg) noexcept { return agg == Aggregation::Any ? "any" : "majority"; }

std::optional<Aggregation> parse_aggregation(std::string_view text) noexcept {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "any") return Aggregation::Any;
    if (lower == "majority") return Aggregation::Majority;
    return std::nullopt;
}

bool flag_scores(std::span<const std::optional<double>> scores, const FlagFilter& filter) noexcept {
    std::size_t non_owner = 0;
    std::size_t owner = 0;
    for (const auto& s : scores) {
        if (!s) continue;
        if (*s < filter.threshold) {
            ++non_owner;
        } else {
            ++owner;
        }
    }
    if (filter.aggregation == Aggregation::Any) return non_owner > 0;
    return non_owner > owner;
}

bool flag_session(const SessionRecord& session, const FlagFilter& filter) {
    const auto scores = session.scores();
    return flag_scores(scores, filter);
}

bool flag_day(std::span<const SessionRecord> sessions, const FlagFilter& filter) {
    return std::any_of(sessions.begin(), sessions.end(),
                       [&](const SessionRecord& s) { return flag_session(s, filter); });
}

}  // namespace auric
