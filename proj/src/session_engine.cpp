// SPDX-License-Identifier: Apache-2.0
#include "auric/session_engine.hpp"

#include "auric/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>

namespace auric {

void FilterConfig::validate() const {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "threshold must be in [0,1]");
    }
    if (capture_interval_ms <= 0) {
        throw Error(ErrorCode::InvalidConfig, "capture_interval_ms must be positive");
    }
    if (coalesce_gap_ms <= 0) {
        throw Error(ErrorCode::InvalidConfig, "coalesce_gap_ms must be positive");
    }
}

std::vector<std::optional<double>> SessionRecord::scores() const {
    std::vector<std::optional<double>> out;
    out.reserve(captures.size());
    for (const auto& c : captures) out.push_back(c.best_score);
    return out;
}

SampleBytes encode_sample(const CaptureSample& sample) {
    SampleBytes bytes;
    if (!sample.face) return bytes;
    bytes.reserve(sample.face->size() * 8);
    for (double x : *sample.face) {
        auto bits = std::bit_cast<std::uint64_t>(x);
        for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
    return bytes;
}

CaptureSample decode_sample(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) return {};
    if (bytes.size() % 8 != 0) throw Error(ErrorCode::BadEmbedding, "sample size is not a multiple of 8");
    Embedding face;
    face.reserve(bytes.size() / 8);
    for (std::size_t off = 0; off < bytes.size(); off += 8) {
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[off + i]) << (8 * i);
        face.push_back(std::bit_cast<double>(bits));
    }
    return CaptureSample{std::move(face)};
}

std::string content_hash(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IoFailure, "sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0x0F]);
    }
    return out;
}

std::string utc_date(Millis ts) {
    using namespace std::chrono;
    const sys_days day = floor<days>(sys_time<milliseconds>(milliseconds(ts)));
    const year_month_day ymd(day);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string make_session_id(Millis start_ts, std::uint32_t same_ms_sequence) {
    return utc_date(start_ts) + "-" + std::to_string(start_ts) + "-" + std::to_string(same_ms_sequence);
}

namespace {

void record_capture(std::vector<CaptureRecord>& records, SampleBlobs& blobs, Millis ts,
                    const CaptureSample& sample, const EnrollmentProfile& profile,
                    const Classifier& classifier) {
    auto verdict = classifier(sample, profile);
    if (verdict.best_score) verdict.best_score = std::clamp(*verdict.best_score, 0.0, 1.0);
    auto bytes = encode_sample(sample);
    auto ref = content_hash(bytes);
    blobs.try_emplace(ref, std::move(bytes));
    records.push_back(CaptureRecord{ts, verdict.best_score, std::move(ref)});
}

struct ActiveSession {
    SessionRecord record;
    Coalescer coalescer;
};

}  // namespace

IngestResult ingest(std::span<const RawEvent> events, const FilterConfig& config,
                    const EnrollmentProfile& profile, const Classifier& classifier) {
    config.validate();
    if (auto report = validate_stream(events); !report.ok()) {
        const auto& first = report.line_errors.front();
        throw Error(ErrorCode::InvalidStream, "event " + std::to_string(first.line_number) + ": " +
                                                  first.reason);
    }
    for (const auto& e : events) {
        const auto* cap = std::get_if<ev::Capture>(&e.payload);
        if (cap && cap->sample.face && cap->sample.face->size() != profile.dimension()) {
            throw Error(ErrorCode::ProfileDimensionMismatch,
                        "capture at " + std::to_string(e.ts) + " has dimension " +
                            std::to_string(cap->sample.face->size()) + ", profile has " +
                            std::to_string(profile.dimension()));
        }
    }

    IngestResult result;
    std::optional<ActiveSession> active;
    std::map<Millis, std::uint32_t> same_ms;

    auto finalize = [&](Millis end_ts) {
        auto& rec = active->record;
        rec.end_ts = end_ts;
        rec.segments = active->coalescer.finish();
        result.sessions.push_back(std::move(rec));
        active.reset();
    };

    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.is<ev::Unlock>()) {
            if (active) {
                active->record.anomalies.emplace_back("duplicate_unlock");
                continue;
            }
            const auto seq = same_ms[e.ts]++;
            active.emplace(ActiveSession{SessionRecord{make_session_id(e.ts, seq), e.ts, e.ts, {}, {}, {}},
                                         Coalescer(config.coalesce_gap_ms)});
        } else if (e.is<ev::ScreenOff>()) {
            if (active) {
                finalize(e.ts);
            } else {
                result.anomalies.push_back({"orphan_screen_off", e.ts, i + 1});
            }
        } else if (!active) {
            result.anomalies.push_back({"event_outside_session", e.ts, i + 1});
        } else if (const auto* cap = std::get_if<ev::Capture>(&e.payload)) {
            record_capture(active->record.captures, result.samples, e.ts, cap->sample, profile, classifier);
        } else {
            active->coalescer.push(e);
        }
    }
    if (active) {
        active->record.anomalies.emplace_back("truncated_session");
        finalize(events.back().ts);
    }
    return result;
}

std::vector<Millis> compute_capture_times(Millis start_ts, Millis end_ts, Millis interval_ms) {
    if (interval_ms <= 0) throw Error(ErrorCode::InvalidConfig, "capture_interval_ms must be positive");
    std::vector<Millis> times;
    if (end_ts < start_ts) return times;
    times.reserve(static_cast<std::size_t>((end_ts - start_ts) / interval_ms) + 1);
    for (Millis t = start_ts; t <= end_ts; t += interval_ms) {
        times.push_back(t);
        if (end_ts - t < interval_ms) break;
    }
    return times;
}

LiveCaptures live_attach(SessionSpan span, CaptureProvider& provider, const FilterConfig& config,
                         const EnrollmentProfile& profile, const Classifier& classifier,
                         std::chrono::milliseconds deadline) {
    config.validate();
    LiveCaptures out;
    for (Millis t : compute_capture_times(span.start_ts, span.end_ts, config.capture_interval_ms)) {
        std::optional<CaptureSample> sample;
        const auto started = std::chrono::steady_clock::now();
        try {
            sample = provider.sample(t);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ProviderFailure) throw;
        }
        if (std::chrono::steady_clock::now() - started > deadline) sample.reset();
        if (sample && sample->face && check_event(RawEvent{t, ev::Capture{*sample}}, profile.dimension())) {
            sample.reset();
        }
        if (!sample) {
            out.records.push_back(CaptureRecord{t, std::nullopt, {}});
            out.anomalies.push_back("capture_failed@" + std::to_string(t));
            continue;
        }
        record_capture(out.records, out.samples, t, *sample, profile, classifier);
    }
    return out;
}

}  // namespace auric
