// SPDX-License-Identifier: Apache-2.0
#include "auric/codec.hpp"
#include "auric/error.hpp"
#include "auric/scenario.hpp"
#include "auric/session_engine.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

using namespace auric;
using namespace auric::test;

namespace {

EnrollmentProfile axis_profile() {
    const double h = std::sqrt(2.0) / 2.0;
    std::vector<Embedding> portraits{{1.0, 0.0}, {0.0, 1.0}, {h, h}};
    return enroll("owner", portraits);
}

ErrorCode ingest_error(const std::vector<RawEvent>& events, const EnrollmentProfile& profile) {
    try {
        ingest(events, FilterConfig{}, profile);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected ingest failure");
    return ErrorCode::IoFailure;
}

class ScriptedProvider : public CaptureProvider {
public:
    std::function<CaptureSample(Millis)> fn;
    std::vector<Millis> requested;
    CaptureSample sample(Millis ts) override {
        requested.push_back(ts);
        return fn(ts);
    }
};

}  // namespace

TEST_CASE("empty session") {
    auto r = ingest(std::vector<RawEvent>{unlock(0), screen_off(1000)}, {}, axis_profile());
    REQUIRE(r.sessions.size() == 1);
    CHECK(r.sessions[0].segments.empty());
    CHECK(r.sessions[0].captures.empty());
    CHECK(r.sessions[0].start_ts == 0);
    CHECK(r.sessions[0].end_ts == 1000);
    CHECK(r.sessions[0].session_id == "1970-01-01-0-0");
    CHECK(r.anomalies.empty());
}

TEST_CASE("events outside a session are dropped and counted") {
    auto r = ingest(std::vector<RawEvent>{click(0, "m", "x"), unlock(10), screen_off(20)}, {}, axis_profile());
    REQUIRE(r.sessions.size() == 1);
    CHECK(r.sessions[0].segments.empty());
    REQUIRE(r.anomalies.size() == 1);
    CHECK(r.anomalies[0] == StreamAnomaly{"event_outside_session", 0, 1});
}

TEST_CASE("lifecycle anomalies") {
    std::vector<RawEvent> events{screen_off(0), unlock(5), click(6, "m", "a"), unlock(7), click(8, "m", "b"),
                                 screen_off(9), capture(10), unlock(11), click(12, "n", "c")};
    auto r = ingest(events, {}, axis_profile());
    REQUIRE(r.sessions.size() == 2);
    CHECK(r.sessions[0].anomalies == std::vector<std::string>{"duplicate_unlock"});
    REQUIRE(r.sessions[0].segments.size() == 1);
    CHECK(r.sessions[0].segments[0].actions.size() == 3);
    CHECK(r.sessions[1].anomalies == std::vector<std::string>{"truncated_session"});
    CHECK(r.sessions[1].end_ts == 12);
    REQUIRE(r.anomalies.size() == 2);
    CHECK(r.anomalies[0].code == "orphan_screen_off");
    CHECK(r.anomalies[1] == StreamAnomaly{"event_outside_session", 10, 7});
}

TEST_CASE("session ids carry the same-millisecond sequence") {
    const Millis t = 1710406800000;  // 2024-03-14T09:00:00Z
    auto r = ingest(std::vector<RawEvent>{unlock(t), screen_off(t), unlock(t), screen_off(t + 1)}, {}, axis_profile());
    REQUIRE(r.sessions.size() == 2);
    CHECK(r.sessions[0].session_id == "2024-03-14-1710406800000-0");
    CHECK(r.sessions[1].session_id == "2024-03-14-1710406800000-1");
    CHECK(utc_date(1710460799999) == "2024-03-14");
    CHECK(utc_date(1710460800000) == "2024-03-15");
}

TEST_CASE("captures are classified in stream order") {
    std::vector<RawEvent> events{unlock(0), capture(0, Embedding{1.0, 0.0}), capture(5), capture(9, Embedding{0.0, -1.0}),
                                 screen_off(10)};
    auto r = ingest(events, {}, axis_profile());
    const auto& caps = r.sessions.at(0).captures;
    REQUIRE(caps.size() == 3);
    CHECK(*caps[0].best_score == doctest::Approx(1.0));
    CHECK_FALSE(caps[1].face_detected());
    CHECK(*caps[2].best_score == 0.0);
    CHECK(r.samples.size() == 3);
    for (const auto& c : caps) {
        REQUIRE(r.samples.count(c.sample_ref) == 1);
        CHECK(content_hash(r.samples.at(c.sample_ref)) == c.sample_ref);
    }
    CHECK(decode_sample(r.samples.at(caps[0].sample_ref)) == CaptureSample{Embedding{1.0, 0.0}});
}

TEST_CASE("ingest preconditions") {
    CHECK(ingest_error({unlock(5), screen_off(3)}, axis_profile()) == ErrorCode::InvalidStream);
    CHECK(ingest_error({unlock(0), capture(1, Embedding{1.0, 0.0, 0.0}), screen_off(2)}, axis_profile()) ==
          ErrorCode::ProfileDimensionMismatch);
    FilterConfig bad;
    bad.threshold = 1.5;
    CHECK_THROWS_AS(ingest(std::vector<RawEvent>{}, bad, axis_profile()), Error);
}

TEST_CASE("compute_capture_times") {
    CHECK(compute_capture_times(0, 25000, 10000) == std::vector<Millis>{0, 10000, 20000});
    CHECK(compute_capture_times(5, 5, 10000) == std::vector<Millis>{5});
    CHECK(compute_capture_times(0, 9999, 10000) == std::vector<Millis>{0});
    CHECK(compute_capture_times(0, 20000, 10000) == std::vector<Millis>{0, 10000, 20000});
    CHECK(compute_capture_times(0, INT64_MAX, INT64_MAX / 2).size() == 3);
}

TEST_CASE("live_attach") {
    const auto profile = axis_profile();
    const SessionSpan span{0, 25000};
    FilterConfig config;

    SUBCASE("no faces") {
        ScriptedProvider provider;
        provider.fn = [](Millis) { return CaptureSample{}; };
        auto out = live_attach(span, provider, config, profile);
        CHECK(provider.requested == std::vector<Millis>{0, 10000, 20000});
        REQUIRE(out.records.size() == 3);
        for (const auto& r : out.records) CHECK_FALSE(r.face_detected());
        CHECK(out.anomalies.empty());
    }
    SUBCASE("owner every time") {
        ScriptedProvider provider;
        provider.fn = [](Millis) { return CaptureSample{Embedding{1.0, 0.0}}; };
        auto out = live_attach(span, provider, config, profile);
        REQUIRE(out.records.size() == 3);
        for (const auto& r : out.records) CHECK(*r.best_score == *classify_sample(CaptureSample{Embedding{1.0, 0.0}}, profile).best_score);
        CHECK(out.samples.size() == 1);  // identical samples share one blob
    }
    SUBCASE("one failure") {
        ScriptedProvider provider;
        provider.fn = [](Millis t) -> CaptureSample {
            if (t == 10000) throw Error(ErrorCode::ProviderFailure, "camera busy");
            return CaptureSample{Embedding{0.0, 1.0}};
        };
        auto out = live_attach(span, provider, config, profile);
        REQUIRE(out.records.size() == 3);
        CHECK_FALSE(out.records[1].face_detected());
        CHECK(out.records[1].sample_ref.empty());
        CHECK(out.anomalies == std::vector<std::string>{"capture_failed@10000"});
    }
    SUBCASE("deadline overrun counts as failure") {
        ScriptedProvider provider;
        provider.fn = [](Millis t) {
            if (t == 0) std::this_thread::sleep_for(std::chrono::milliseconds(30));
            return CaptureSample{Embedding{0.0, 1.0}};
        };
        auto out = live_attach(span, provider, config, profile, reference_classifier(), std::chrono::milliseconds(10));
        CHECK(out.anomalies == std::vector<std::string>{"capture_failed@0"});
        CHECK(out.records.size() == 3);
    }
}

TEST_CASE("property: session and capture counts on fuzz streams") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto sc = generate("random", seed);
        REQUIRE(validate_stream(sc.events).ok());
        const auto r = ingest(sc.events, sc.config, sc.owner_profile);

        std::size_t unlocks = 0, captures = 0;
        bool active = false;
        for (const auto& e : sc.events) {
            if (e.is<ev::Unlock>() && !active) {
                ++unlocks;
                active = true;
            } else if (e.is<ev::ScreenOff>()) {
                active = false;
            } else if (e.is<ev::Capture>() && active) {
                ++captures;
            }
        }
        CHECK(r.sessions.size() == unlocks);
        std::size_t got = 0;
        for (const auto& s : r.sessions) {
            got += s.captures.size();
            CHECK(s.start_ts <= s.end_ts);
            for (const auto& seg : s.segments) {
                CHECK(seg.ts_start >= s.start_ts);
                CHECK(seg.ts_end <= s.end_ts);
            }
            for (const auto& c : s.captures) {
                CHECK(c.ts >= s.start_ts);
                CHECK(c.ts <= s.end_ts);
            }
        }
        CHECK(got == captures);

        // determinism and classifier independence of the action log
        const auto again = ingest(sc.events, sc.config, sc.owner_profile);
        const auto blind = ingest(sc.events, sc.config, sc.owner_profile, no_face_classifier());
        REQUIRE(again.sessions.size() == r.sessions.size());
        REQUIRE(blind.sessions.size() == r.sessions.size());
        for (std::size_t i = 0; i < r.sessions.size(); ++i) {
            CHECK(serialize_session(again.sessions[i]) == serialize_session(r.sessions[i]));
            CHECK(blind.sessions[i].segments == r.sessions[i].segments);
            CHECK(blind.sessions[i].captures.size() == r.sessions[i].captures.size());
        }
    }
}
