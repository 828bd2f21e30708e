// SPDX-License-Identifier: Apache-2.0
#pragma once

// Raw UI/system event taxonomy and the line-delimited event stream format.
//
// One record per line, e.g.
//   {"ts":0,"kind":"UNLOCK"}
//   {"ts":5000,"kind":"TEXT_CHANGE","app":"messages","field":"body","delta":"h"}
//   {"ts":10,"kind":"CAPTURE","face":[0.6,0.8]}
// A CAPTURE without a detectable face carries "face":null.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace auric {

using Millis = std::int64_t;
using Embedding = std::vector<double>;

inline constexpr double kUnitNormTolerance = 1e-6;
inline constexpr std::string_view kBackspace = "\b";

enum class ScrollDirection { Up, Down };

std::string_view to_string(ScrollDirection dir) noexcept;
std::optional<ScrollDirection> parse_direction(std::string_view text) noexcept;

/// Optional face embedding standing in for a front-camera picture.
struct CaptureSample {
    std::optional<Embedding> face;

    bool has_face() const noexcept { return face.has_value(); }
    friend bool operator==(const CaptureSample&, const CaptureSample&) = default;
};

namespace ev {
struct Unlock {
    friend bool operator==(const Unlock&, const Unlock&) = default;
};
struct ScreenOff {
    friend bool operator==(const ScreenOff&, const ScreenOff&) = default;
};
struct WindowState {
    std::string app_id;
    std::string window_title;
    friend bool operator==(const WindowState&, const WindowState&) = default;
};
struct ViewClick {
    std::string app_id;
    std::string widget_label;
    friend bool operator==(const ViewClick&, const ViewClick&) = default;
};
struct TextChange {
    std::string app_id;
    std::string field_id;
    std::string delta;
    friend bool operator==(const TextChange&, const TextChange&) = default;
};
struct Scroll {
    std::string app_id;
    ScrollDirection direction = ScrollDirection::Down;
    friend bool operator==(const Scroll&, const Scroll&) = default;
};
struct Capture {
    CaptureSample sample;
    friend bool operator==(const Capture&, const Capture&) = default;
};
}  // namespace ev

using EventPayload = std::variant<ev::Unlock, ev::ScreenOff, ev::WindowState, ev::ViewClick,
                                  ev::TextChange, ev::Scroll, ev::Capture>;

struct RawEvent {
    Millis ts = 0;
    EventPayload payload;

    /// Uppercase wire name of the kind, e.g. "TEXT_CHANGE".
    std::string_view kind_name() const noexcept;
    /// Empty for UNLOCK, SCREEN_OFF and CAPTURE.
    std::string_view app_id() const noexcept;
    bool is_app_scoped() const noexcept;

    template <typename T>
    bool is() const noexcept {
        return std::holds_alternative<T>(payload);
    }

    friend bool operator==(const RawEvent&, const RawEvent&) = default;
};

double euclidean_norm(std::span<const double> v) noexcept;
bool is_unit_norm(std::span<const double> v) noexcept;

/// Decodes one stream record. When `expected_dim` is set, face embeddings of any other
/// dimension are rejected as BadEmbedding.
/// Throws Error{MalformedLine, UnknownKind, BadEmbedding, NegativeTimestamp}.
RawEvent parse_event_line(std::string_view line,
                          std::optional<std::size_t> expected_dim = std::nullopt);

/// Canonical single-line encoding (no trailing newline).
std::string serialize_event(const RawEvent& event);

struct LineError {
    std::size_t line_number = 0;  // 1-based position in the stream
    std::string reason;
    friend bool operator==(const LineError&, const LineError&) = default;
};

struct ValidationReport {
    std::vector<LineError> line_errors;

    bool ok() const noexcept { return line_errors.empty(); }
};

/// Checks type invariants of a single event; returns the violation reason if any.
std::optional<std::string> check_event(const RawEvent& event,
                                       std::optional<std::size_t> expected_dim = std::nullopt);

ValidationReport validate_stream(std::span<const RawEvent> events,
                                 std::optional<std::size_t> expected_dim = std::nullopt);

/// Result of decoding a whole text stream: every line that parsed plus a report covering
/// both decode failures and stream-level violations. Blank lines are skipped.
struct DecodedStream {
    std::vector<RawEvent> events;
    ValidationReport report;
};

DecodedStream decode_stream(std::string_view text,
                            std::optional<std::size_t> expected_dim = std::nullopt);

std::string encode_stream(std::span<const RawEvent> events);

}  // namespace auric
