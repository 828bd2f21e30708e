// SPDX-License-Identifier: Apache-2.0
#pragma once

// Coalesces in-session app-scoped events into human-readable actions grouped into
// chronological per-app segments.
//
// Rules:
//  - A WINDOW_STATE for an app other than the current segment's closes that segment and
//    opens a new one starting with OPENED. A WINDOW_STATE for the current app is absorbed.
//  - TEXT_CHANGE events merge into one TYPED action while (app, field) stays the same, the gap
//    to the previous keystroke is <= gap_ms, and no tap or scroll intervenes. The text is the
//    fold of the deltas; a "\b" delta drops the last character (no-op on empty text).
//  - VIEW_CLICK maps 1:1 to TAPPED.
//  - Consecutive same-direction SCROLLs merge into SCROLLED with a count.
//  - Any app-scoped event for an app other than the current segment's opens a new segment
//    with a synthesized OPENED at that event's timestamp.

#include "auric/event.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace auric {

inline constexpr Millis kDefaultCoalesceGapMs = 2000;

namespace act {
struct Opened {
    std::string app_id;
    friend bool operator==(const Opened&, const Opened&) = default;
};
struct Tapped {
    std::string widget_label;
    friend bool operator==(const Tapped&, const Tapped&) = default;
};
struct Typed {
    std::string field_id;
    std::string text;
    friend bool operator==(const Typed&, const Typed&) = default;
};
struct Scrolled {
    ScrollDirection direction = ScrollDirection::Down;
    std::uint32_t count = 1;
    friend bool operator==(const Scrolled&, const Scrolled&) = default;
};
}  // namespace act

using ActionKind = std::variant<act::Opened, act::Tapped, act::Typed, act::Scrolled>;

struct ActionRecord {
    Millis ts_start = 0;
    Millis ts_end = 0;
    ActionKind kind;
    std::string description;
    /// Raw events folded into this action. A synthesized OPENED starts at 0; absorbed
    /// same-app WINDOW_STATEs are credited to the segment's OPENED.
    std::uint32_t source_events = 0;

    friend bool operator==(const ActionRecord&, const ActionRecord&) = default;
};

struct AppSegment {
    std::string app_id;
    Millis ts_start = 0;
    Millis ts_end = 0;
    std::vector<ActionRecord> actions;

    friend bool operator==(const AppSegment&, const AppSegment&) = default;
};

/// Canonical one-line rendering of an action.
std::string describe(const ActionRecord& action);

/// Applies the backspace-aware fold of a single delta to `text`. Removes one UTF-8 code point
/// for the backspace sentinel.
void apply_delta(std::string& text, std::string_view delta);

/// Number of UTF-8 code points in `text`.
std::size_t code_point_count(std::string_view text) noexcept;

/// Streaming coalescer. Single writer; feed events in time order, collect closed segments
/// with take_completed(), and close the stream with finish().
class Coalescer {
public:
    explicit Coalescer(Millis gap_ms = kDefaultCoalesceGapMs);

    /// Throws Error{NotAppScoped} for UNLOCK, SCREEN_OFF and CAPTURE.
    void push(const RawEvent& event);

    /// Segments closed so far, in order; ownership moves to the caller.
    std::vector<AppSegment> take_completed();

    /// Closes the open segment and returns every segment not yet taken.
    std::vector<AppSegment> finish();

    Millis gap_ms() const noexcept { return gap_ms_; }

private:
    void flush_pending();
    void close_segment();
    void open_segment(const std::string& app_id, Millis ts, bool from_window_state);
    void add_action(ActionRecord action);

    Millis gap_ms_;
    std::optional<AppSegment> current_;
    std::optional<ActionRecord> pending_;  // TYPED or SCROLLED still accepting events
    Millis pending_last_ts_ = 0;
    std::vector<AppSegment> completed_;
};

/// Batch form of Coalescer.
std::vector<AppSegment> coalesce(std::span<const RawEvent> events, Millis gap_ms = kDefaultCoalesceGapMs);

}  // namespace auric
