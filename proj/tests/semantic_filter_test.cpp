// SPDX-License-Identifier: Apache-2.0
#include "auric/error.hpp"
#include "auric/semantic_filter.hpp"
#include "test_support.hpp"
#include "typing_oracle.hpp"

#include <doctest.h>

#include <map>
#include <random>

using namespace auric;
using namespace auric::test;

namespace {

void check_segment_invariants(const std::vector<AppSegment>& segments) {
    Millis prev_end = std::numeric_limits<Millis>::min();
    for (const auto& seg : segments) {
        REQUIRE_FALSE(seg.actions.empty());
        CHECK(std::holds_alternative<act::Opened>(seg.actions.front().kind));
        CHECK(seg.ts_start <= seg.ts_end);
        CHECK(seg.ts_start >= prev_end);
        prev_end = seg.ts_end;
        Millis prev_start = seg.ts_start;
        for (const auto& a : seg.actions) {
            CHECK(a.ts_start <= a.ts_end);
            CHECK(a.ts_start >= prev_start);
            CHECK(a.ts_start >= seg.ts_start);
            CHECK(a.ts_end <= seg.ts_end);
            CHECK(a.description == describe(a));
            prev_start = a.ts_start;
        }
    }
}

}  // namespace

TEST_CASE("describe templates") {
    CHECK(describe({0, 0, act::Opened{"messages"}, {}, 1}) == "Opened messages");
    CHECK(describe({0, 0, act::Typed{"body", "hi"}, {}, 1}) == "Typed \"hi\" in body");
    CHECK(describe({0, 0, act::Scrolled{ScrollDirection::Down, 3}, {}, 3}) == "Scrolled DOWN ×3");
    CHECK(describe({0, 0, act::Tapped{"Next"}, {}, 1}) == "Tapped \"Next\"");
}

TEST_CASE("empty body coalesces to nothing") { CHECK(coalesce({}).empty()); }

TEST_CASE("one hundred keystrokes become one typed string") {
    std::vector<RawEvent> events;
    std::string expected;
    for (int i = 0; i < 100; ++i) {
        const std::string ch(1, static_cast<char>('a' + i % 26));
        expected += ch;
        events.push_back(text(1000 + i * 150, "messages", "body", ch));
    }
    auto segments = coalesce(events);
    REQUIRE(segments.size() == 1);
    REQUIRE(segments[0].actions.size() == 2);
    const auto& typed = std::get<act::Typed>(segments[0].actions[1].kind);
    CHECK(typed.text == expected);
    CHECK(typed.text.size() == 100);
    CHECK(segments[0].actions[1].source_events == 100);
}

TEST_CASE("backspace folds") {
    // "h" -> "hi" -> "h" -> "h!"
    std::vector<RawEvent> events{text(0, "m", "body", "h"), text(10, "m", "body", "i"), text(20, "m", "body", "\b"),
                                 text(30, "m", "body", "!")};
    auto segments = coalesce(events);
    REQUIRE(segments.size() == 1);
    REQUIRE(segments[0].actions.size() == 2);
    CHECK(std::get<act::Typed>(segments[0].actions[1].kind).text == "h!");

    std::string s;
    apply_delta(s, "\b");
    CHECK(s.empty());
    apply_delta(s, "aé");
    apply_delta(s, "\b");
    CHECK(s == "a");
}

TEST_CASE("gallery to email produces two segments") {
    std::vector<RawEvent> events{window(0, "gallery"), click(100, "gallery", "Next"), window(200, "email")};
    auto segments = coalesce(events);
    REQUIRE(segments.size() == 2);
    CHECK(segments[0].app_id == "gallery");
    REQUIRE(segments[0].actions.size() == 2);
    CHECK(segments[0].actions[0].description == "Opened gallery");
    CHECK(segments[0].actions[1].description == "Tapped \"Next\"");
    CHECK(segments[1].app_id == "email");
    REQUIRE(segments[1].actions.size() == 1);
    CHECK(segments[1].actions[0].description == "Opened email");
}

TEST_CASE("typing breaks") {
    SUBCASE("gap longer than gap_ms") {
        auto s = coalesce(std::vector<RawEvent>{text(0, "m", "f", "a"), text(2001, "m", "f", "b")});
        CHECK(s[0].actions.size() == 3);
        auto joined = coalesce(std::vector<RawEvent>{text(0, "m", "f", "a"), text(2000, "m", "f", "b")});
        CHECK(joined[0].actions.size() == 2);
    }
    SUBCASE("field change") {
        auto s = coalesce(std::vector<RawEvent>{text(0, "m", "to", "a"), text(1, "m", "body", "b")});
        REQUIRE(s[0].actions.size() == 3);
        CHECK(s[0].actions[1].description == "Typed \"a\" in to");
        CHECK(s[0].actions[2].description == "Typed \"b\" in body");
    }
    SUBCASE("intervening tap") {
        auto s = coalesce(std::vector<RawEvent>{text(0, "m", "f", "a"), click(1, "m", "x"), text(2, "m", "f", "b")});
        CHECK(s[0].actions.size() == 4);
    }
    SUBCASE("same-app window state is absorbed") {
        auto s = coalesce(std::vector<RawEvent>{window(0, "m"), text(1, "m", "f", "a"), window(2, "m"),
                                                text(3, "m", "f", "b")});
        REQUIRE(s.size() == 1);
        REQUIRE(s[0].actions.size() == 2);
        CHECK(s[0].actions[1].description == "Typed \"ab\" in f");
        CHECK(s[0].actions[0].source_events == 2);
    }
    SUBCASE("custom gap") {
        auto s = coalesce(std::vector<RawEvent>{text(0, "m", "f", "a"), text(60, "m", "f", "b")}, 50);
        CHECK(s[0].actions.size() == 3);
    }
}

TEST_CASE("scrolls coalesce by direction") {
    std::vector<RawEvent> events{scroll(0, "m", ScrollDirection::Down), scroll(10, "m", ScrollDirection::Down),
                                 scroll(20, "m", ScrollDirection::Down), scroll(30, "m", ScrollDirection::Up),
                                 scroll(40, "m", ScrollDirection::Down)};
    auto s = coalesce(events);
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].actions.size() == 4);
    CHECK(s[0].actions[0].source_events == 0);  // synthesized OPENED
    CHECK(s[0].actions[1].description == "Scrolled DOWN ×3");
    CHECK(s[0].actions[1].ts_start == 0);
    CHECK(s[0].actions[1].ts_end == 20);
    CHECK(s[0].actions[2].description == "Scrolled UP ×1");
    CHECK(s[0].actions[3].description == "Scrolled DOWN ×1");
}

TEST_CASE("events before a window state open an implicit segment") {
    auto s = coalesce(std::vector<RawEvent>{click(5, "browser", "History"), window(6, "browser")});
    REQUIRE(s.size() == 1);
    CHECK(s[0].actions[0].description == "Opened browser");
    CHECK(s[0].actions[0].ts_start == 5);
    CHECK(s[0].actions.size() == 2);
}

TEST_CASE("revisiting an app opens a new segment") {
    auto s = coalesce(std::vector<RawEvent>{window(0, "a"), window(1, "b"), window(2, "a")});
    REQUIRE(s.size() == 3);
    CHECK(s[2].app_id == "a");
}

TEST_CASE("non app-scoped events are rejected") {
    Coalescer c;
    for (const auto& e : {unlock(0), screen_off(0), capture(0)}) {
        try {
            c.push(e);
            FAIL("expected NotAppScoped");
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::NotAppScoped);
        }
    }
}

TEST_CASE("property: conservation, bookkeeping, bounds and streaming equivalence") {
    std::mt19937_64 rng(20240314);
    for (int iter = 0; iter < 300; ++iter) {
        const Millis gap = 200 + static_cast<Millis>(rng() % 3000);
        const auto events = random_body(rng, rng() % 120, gap);
        const auto segments = coalesce(events, gap);
        check_segment_invariants(segments);

        // conservation against the character simulator
        TypingOracle oracle(events, gap);
        std::map<std::pair<std::string, std::string>, std::vector<std::string>> runs;
        std::map<std::pair<std::string, std::string>, long> chars;
        std::size_t typed = 0, scrolled = 0, text_events = 0, scroll_events = 0, counted = 0;
        for (const auto& seg : segments) {
            for (const auto& a : seg.actions) {
                counted += a.source_events;
                if (const auto* t = std::get_if<act::Typed>(&a.kind)) {
                    ++typed;
                    runs[{seg.app_id, t->field_id}].push_back(t->text);
                    chars[{seg.app_id, t->field_id}] += static_cast<long>(code_point_count(t->text));
                }
                if (std::holds_alternative<act::Scrolled>(a.kind)) ++scrolled;
            }
        }
        CHECK(runs == oracle.runs);
        for (const auto& [key, n] : oracle.typed_chars) {
            CHECK(chars[key] == n - oracle.effective_erases[key]);
        }
        for (const auto& e : events) {
            text_events += e.is<ev::TextChange>();
            scroll_events += e.is<ev::Scroll>();
        }
        CHECK(typed <= text_events);
        CHECK(scrolled <= scroll_events);
        CHECK(counted == events.size());

        // streaming with arbitrary flush points gives the batch result
        Coalescer streaming(gap);
        std::vector<AppSegment> streamed;
        for (const auto& e : events) {
            streaming.push(e);
            if (rng() % 4 == 0) {
                for (auto& s : streaming.take_completed()) streamed.push_back(std::move(s));
            }
        }
        for (auto& s : streaming.finish()) streamed.push_back(std::move(s));
        CHECK(streamed == segments);
    }
}
