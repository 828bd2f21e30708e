// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "auric/event.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace auric {

inline constexpr std::size_t kPortraitCount = 3;

struct EnrollmentProfile {
    std::string owner_id;
    std::array<Embedding, kPortraitCount> portraits;
    Millis created_ts = 0;

    std::size_t dimension() const noexcept { return portraits[0].size(); }
    friend bool operator==(const EnrollmentProfile&, const EnrollmentProfile&) = default;
};

/// Validated construction. Throws Error{WrongPortraitCount, BadEmbedding}.
EnrollmentProfile enroll(std::string owner_id, std::span<const Embedding> portraits, Millis created_ts = 0);

/// nullopt means no face was detected; otherwise the best similarity in [0,1].
struct CaptureVerdict {
    std::optional<double> best_score;

    bool face_detected() const noexcept { return best_score.has_value(); }
    static CaptureVerdict no_face() { return {}; }
    static CaptureVerdict face(double score) { return {score}; }
    friend bool operator==(const CaptureVerdict&, const CaptureVerdict&) = default;
};

/// Pluggable classifier contract. Implementations map NONE to no_face() and a face sample
/// to a score in [0,1], throwing Error{DimensionMismatch} on a dimension mismatch.
using Classifier = std::function<CaptureVerdict(const CaptureSample&, const EnrollmentProfile&)>;

/// Cosine similarity clamped to [0,1].
double similarity(std::span<const double> a, std::span<const double> b) noexcept;

/// Reference classifier: best clamped cosine over the three portraits.
CaptureVerdict classify_sample(const CaptureSample& sample, const EnrollmentProfile& profile);

Classifier reference_classifier();
/// Reports every sample as faceless; used to exercise false-negative behaviour.
Classifier no_face_classifier();

enum class Aggregation { Any, Majority };

std::string_view to_string(Aggregation agg) noexcept;
/// Accepts "any"/"majority" in either case.
std::optional<Aggregation> parse_aggregation(std::string_view text) noexcept;

struct FlagFilter {
    double threshold = 0.6;
    Aggregation aggregation = Aggregation::Any;
    friend bool operator==(const FlagFilter&, const FlagFilter&) = default;
};

/// Flag decision over the per-capture best scores of one session (nullopt = no face).
/// A face scoring below the threshold counts as non-owner, at or above as owner.
bool flag_scores(std::span<const std::optional<double>> scores, const FlagFilter& filter) noexcept;

struct SessionRecord;

bool flag_session(const SessionRecord& session, const FlagFilter& filter);
bool flag_day(std::span<const SessionRecord> sessions, const FlagFilter& filter);

}  // namespace auric
