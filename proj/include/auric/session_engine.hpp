// SPDX-License-Identifier: Apache-2.0
#pragma once

// Session reconstruction: an UNLOCK..SCREEN_OFF span becomes one SessionRecord holding the
// coalesced app segments, the classified capture samples and any anomalies seen inside it.

#include "auric/event.hpp"
#include "auric/face_gate.hpp"
#include "auric/semantic_filter.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace auric {

struct FilterConfig {
    double threshold = 0.6;
    Aggregation aggregation = Aggregation::Any;
    Millis capture_interval_ms = 10000;
    Millis coalesce_gap_ms = kDefaultCoalesceGapMs;
    bool notifications_visible = true;

    FlagFilter filter() const noexcept { return {threshold, aggregation}; }
    /// Throws Error{InvalidConfig} naming the offending key.
    void validate() const;

    friend bool operator==(const FilterConfig&, const FilterConfig&) = default;
};

struct CaptureRecord {
    Millis ts = 0;
    std::optional<double> best_score;  // present iff a face was detected
    std::string sample_ref;            // sha256 of the stored sample; empty if capture failed

    bool face_detected() const noexcept { return best_score.has_value(); }
    friend bool operator==(const CaptureRecord&, const CaptureRecord&) = default;
};

struct SessionRecord {
    std::string session_id;
    Millis start_ts = 0;
    Millis end_ts = 0;
    std::vector<AppSegment> segments;
    std::vector<CaptureRecord> captures;
    std::vector<std::string> anomalies;

    std::vector<std::optional<double>> scores() const;
    friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

/// Anomaly outside any session (event_outside_session, orphan_screen_off).
struct StreamAnomaly {
    std::string code;
    Millis ts = 0;
    std::size_t position = 0;  // 1-based index in the stream
    friend bool operator==(const StreamAnomaly&, const StreamAnomaly&) = default;
};

using SampleBytes = std::vector<std::uint8_t>;
/// sample_ref -> stored bytes
using SampleBlobs = std::map<std::string, SampleBytes>;

/// Stored form of a sample: the embedding as little-endian IEEE-754 doubles; empty for no face.
SampleBytes encode_sample(const CaptureSample& sample);
CaptureSample decode_sample(std::span<const std::uint8_t> bytes);
/// Lowercase hex SHA-256.
std::string content_hash(std::span<const std::uint8_t> bytes);

/// `<YYYY-MM-DD>-<start_ts>-<seq>` with the UTC date of start_ts.
std::string make_session_id(Millis start_ts, std::uint32_t same_ms_sequence);
/// UTC calendar date of a timestamp, as YYYY-MM-DD.
std::string utc_date(Millis ts);

struct IngestResult {
    std::vector<SessionRecord> sessions;
    std::vector<StreamAnomaly> anomalies;
    SampleBlobs samples;
};

/// Reconstructs sessions from a validated stream.
/// Throws Error{InvalidStream} if validation fails and Error{ProfileDimensionMismatch} when a
/// captured face does not match the profile's dimension.
IngestResult ingest(std::span<const RawEvent> events, const FilterConfig& config,
                    const EnrollmentProfile& profile, const Classifier& classifier = reference_classifier());

/// {start + k*interval : k >= 0} within [start, end].
std::vector<Millis> compute_capture_times(Millis start_ts, Millis end_ts, Millis interval_ms);

/// Source of live samples. sample() throws Error{ProviderFailure} when no sample can be taken.
class CaptureProvider {
public:
    virtual ~CaptureProvider() = default;
    virtual CaptureSample sample(Millis ts) = 0;
};

inline constexpr std::chrono::milliseconds kDefaultProviderDeadline{1000};

struct SessionSpan {
    Millis start_ts = 0;
    Millis end_ts = 0;
};

struct LiveCaptures {
    std::vector<CaptureRecord> records;
    std::vector<std::string> anomalies;  // capture_failed@<ts>
    SampleBlobs samples;
};

/// Pulls one sample per scheduled capture time from the provider and classifies it. A
/// provider that throws or overruns the deadline yields a faceless record without a sample.
LiveCaptures live_attach(SessionSpan span, CaptureProvider& provider, const FilterConfig& config,
                         const EnrollmentProfile& profile, const Classifier& classifier = reference_classifier(),
                         std::chrono::milliseconds deadline = kDefaultProviderDeadline);

}  // namespace auric
