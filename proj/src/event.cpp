// SPDX-License-Identifier: Apache-2.0
#include "auric/event.hpp"

#include "auric/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <initializer_list>
#include <string>

namespace auric {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

void require_fields(const json& obj, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (auto name : allowed) {
            if (key == name) {
                known = true;
                break;
            }
        }
        if (!known) fail(ErrorCode::MalformedLine, "unexpected field \"" + key + "\"");
    }
    for (auto name : allowed) {
        if (!obj.contains(name)) {
            fail(ErrorCode::MalformedLine, "missing field \"" + std::string(name) + "\"");
        }
    }
}

std::string text_field(const json& obj, const char* name) {
    const auto& v = obj.at(name);
    if (!v.is_string()) fail(ErrorCode::MalformedLine, std::string("field \"") + name + "\" must be a string");
    return v.get<std::string>();
}

std::string app_field(const json& obj) {
    auto app = text_field(obj, "app");
    if (app.empty()) fail(ErrorCode::MalformedLine, "app must be non-empty");
    return app;
}

CaptureSample parse_face(const json& v, std::optional<std::size_t> expected_dim) {
    if (v.is_null()) return {};
    if (!v.is_array()) fail(ErrorCode::MalformedLine, "face must be an array or null");
    Embedding e;
    e.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) fail(ErrorCode::MalformedLine, "face components must be numbers");
        e.push_back(x.get<double>());
    }
    if (e.empty()) fail(ErrorCode::BadEmbedding, "face embedding is empty");
    if (expected_dim && e.size() != *expected_dim) {
        fail(ErrorCode::BadEmbedding, "face embedding has dimension " + std::to_string(e.size()) +
                                          ", expected " + std::to_string(*expected_dim));
    }
    if (!is_unit_norm(e)) fail(ErrorCode::BadEmbedding, "face embedding is not unit norm");
    return CaptureSample{std::move(e)};
}

}  // namespace

std::string_view to_string(ScrollDirection dir) noexcept {
    return dir == ScrollDirection::Up ? "UP" : "DOWN";
}

std::optional<ScrollDirection> parse_direction(std::string_view text) noexcept {
    if (text == "UP") return ScrollDirection::Up;
    if (text == "DOWN") return ScrollDirection::Down;
    return std::nullopt;
}

std::string_view RawEvent::kind_name() const noexcept {
    return std::visit(overloaded{
                          [](const ev::Unlock&) { return std::string_view("UNLOCK"); },
                          [](const ev::ScreenOff&) { return std::string_view("SCREEN_OFF"); },
                          [](const ev::WindowState&) { return std::string_view("WINDOW_STATE"); },
                          [](const ev::ViewClick&) { return std::string_view("VIEW_CLICK"); },
                          [](const ev::TextChange&) { return std::string_view("TEXT_CHANGE"); },
                          [](const ev::Scroll&) { return std::string_view("SCROLL"); },
                          [](const ev::Capture&) { return std::string_view("CAPTURE"); },
                      },
                      payload);
}

std::string_view RawEvent::app_id() const noexcept {
    return std::visit(overloaded{
                          [](const ev::WindowState& e) { return std::string_view(e.app_id); },
                          [](const ev::ViewClick& e) { return std::string_view(e.app_id); },
                          [](const ev::TextChange& e) { return std::string_view(e.app_id); },
                          [](const ev::Scroll& e) { return std::string_view(e.app_id); },
                          [](const auto&) { return std::string_view(); },
                      },
                      payload);
}

bool RawEvent::is_app_scoped() const noexcept {
    return is<ev::WindowState>() || is<ev::ViewClick>() || is<ev::TextChange>() || is<ev::Scroll>();
}

double euclidean_norm(std::span<const double> v) noexcept {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

bool is_unit_norm(std::span<const double> v) noexcept {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return !v.empty() && std::abs(euclidean_norm(v) - 1.0) <= kUnitNormTolerance;
}

RawEvent parse_event_line(std::string_view line, std::optional<std::size_t> expected_dim) {
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) fail(ErrorCode::MalformedLine, "not a valid record");
    if (!obj.is_object()) fail(ErrorCode::MalformedLine, "record must be an object");
    if (!obj.contains("ts")) fail(ErrorCode::MalformedLine, "missing field \"ts\"");
    if (!obj.contains("kind")) fail(ErrorCode::MalformedLine, "missing field \"kind\"");

    const auto& ts = obj["ts"];
    if (!ts.is_number_integer()) fail(ErrorCode::MalformedLine, "ts must be an integer");
    RawEvent event;
    if (ts.is_number_unsigned()) {
        if (ts.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
            fail(ErrorCode::MalformedLine, "ts out of range");
        }
        event.ts = static_cast<Millis>(ts.get<std::uint64_t>());
    } else {
        event.ts = ts.get<std::int64_t>();
    }
    if (event.ts < 0) fail(ErrorCode::NegativeTimestamp, "negative timestamp");

    if (!obj["kind"].is_string()) fail(ErrorCode::MalformedLine, "kind must be a string");
    const auto kind = obj["kind"].get<std::string>();

    if (kind == "UNLOCK") {
        require_fields(obj, {"ts", "kind"});
        event.payload = ev::Unlock{};
    } else if (kind == "SCREEN_OFF") {
        require_fields(obj, {"ts", "kind"});
        event.payload = ev::ScreenOff{};
    } else if (kind == "WINDOW_STATE") {
        require_fields(obj, {"ts", "kind", "app", "window"});
        event.payload = ev::WindowState{app_field(obj), text_field(obj, "window")};
    } else if (kind == "VIEW_CLICK") {
        require_fields(obj, {"ts", "kind", "app", "widget"});
        event.payload = ev::ViewClick{app_field(obj), text_field(obj, "widget")};
    } else if (kind == "TEXT_CHANGE") {
        require_fields(obj, {"ts", "kind", "app", "field", "delta"});
        auto delta = text_field(obj, "delta");
        if (delta.empty()) fail(ErrorCode::MalformedLine, "delta must be non-empty");
        event.payload = ev::TextChange{app_field(obj), text_field(obj, "field"), std::move(delta)};
    } else if (kind == "SCROLL") {
        require_fields(obj, {"ts", "kind", "app", "direction"});
        auto dir = parse_direction(text_field(obj, "direction"));
        if (!dir) fail(ErrorCode::MalformedLine, "direction must be UP or DOWN");
        event.payload = ev::Scroll{app_field(obj), *dir};
    } else if (kind == "CAPTURE") {
        require_fields(obj, {"ts", "kind", "face"});
        event.payload = ev::Capture{parse_face(obj["face"], expected_dim)};
    } else {
        fail(ErrorCode::UnknownKind, "unknown kind \"" + kind + "\"");
    }
    return event;
}

std::string serialize_event(const RawEvent& event) {
    ordered_json obj;
    obj["ts"] = event.ts;
    obj["kind"] = event.kind_name();
    std::visit(overloaded{
                   [](const ev::Unlock&) {},
                   [](const ev::ScreenOff&) {},
                   [&](const ev::WindowState& e) {
                       obj["app"] = e.app_id;
                       obj["window"] = e.window_title;
                   },
                   [&](const ev::ViewClick& e) {
                       obj["app"] = e.app_id;
                       obj["widget"] = e.widget_label;
                   },
                   [&](const ev::TextChange& e) {
                       obj["app"] = e.app_id;
                       obj["field"] = e.field_id;
                       obj["delta"] = e.delta;
                   },
                   [&](const ev::Scroll& e) {
                       obj["app"] = e.app_id;
                       obj["direction"] = to_string(e.direction);
                   },
                   [&](const ev::Capture& e) {
                       obj["face"] = e.sample.face ? ordered_json(*e.sample.face) : ordered_json(nullptr);
                   },
               },
               event.payload);
    return obj.dump();
}

std::optional<std::string> check_event(const RawEvent& event, std::optional<std::size_t> expected_dim) {
    if (event.ts < 0) return "negative timestamp";
    if (event.is_app_scoped() && event.app_id().empty()) return "empty app id";
    if (const auto* tc = std::get_if<ev::TextChange>(&event.payload); tc && tc->delta.empty()) {
        return "empty text delta";
    }
    if (const auto* cap = std::get_if<ev::Capture>(&event.payload); cap && cap->sample.face) {
        const auto& face = *cap->sample.face;
        if (expected_dim && face.size() != *expected_dim) return "embedding dimension mismatch";
        if (!is_unit_norm(face)) return "embedding not unit norm";
    }
    return std::nullopt;
}

ValidationReport validate_stream(std::span<const RawEvent> events, std::optional<std::size_t> expected_dim) {
    ValidationReport report;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (auto reason = check_event(events[i], expected_dim)) {
            report.line_errors.push_back({i + 1, *reason});
        }
        if (i > 0 && events[i].ts < events[i - 1].ts) {
            report.line_errors.push_back({i + 1, "timestamp regression"});
        }
    }
    return report;
}

DecodedStream decode_stream(std::string_view text, std::optional<std::size_t> expected_dim) {
    DecodedStream out;
    std::optional<Millis> last_ts;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        try {
            auto event = parse_event_line(line, expected_dim);
            if (last_ts && event.ts < *last_ts) {
                out.report.line_errors.push_back({line_no, "timestamp regression"});
            }
            last_ts = event.ts;
            out.events.push_back(std::move(event));
        } catch (const Error& e) {
            out.report.line_errors.push_back({line_no, std::string(to_string(e.code())) + ": " + e.what()});
        }
    }
    return out;
}

std::string encode_stream(std::span<const RawEvent> events) {
    std::string out;
    for (const auto& e : events) {
        out += serialize_event(e);
        out += '\n';
    }
    return out;
}

}  // namespace auric
