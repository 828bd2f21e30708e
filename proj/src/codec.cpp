// SPDX-License-Identifier: Apache-2.0
#include "auric/codec.hpp"

#include "auric/error.hpp"

#include <charconv>
#include <string>

namespace auric {

namespace {

using json = nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedLine, what); }

const json& field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) malformed(std::string("missing field \"") + name + "\"");
    return j.at(name);
}

Millis ms_field(const json& j, const char* name) {
    const auto& v = field(j, name);
    if (!v.is_number_integer()) malformed(std::string("field \"") + name + "\" must be an integer");
    return v.get<Millis>();
}

std::string str_field(const json& j, const char* name) {
    const auto& v = field(j, name);
    if (!v.is_string()) malformed(std::string("field \"") + name + "\" must be a string");
    return v.get<std::string>();
}

Embedding embedding_from_json(const json& v) {
    if (!v.is_array()) malformed("embedding must be an array");
    Embedding e;
    for (const auto& x : v) {
        if (!x.is_number()) malformed("embedding components must be numbers");
        e.push_back(x.get<double>());
    }
    return e;
}

ActionRecord action_from_json(const json& j) {
    ActionRecord a;
    a.ts_start = ms_field(j, "ts_start");
    a.ts_end = ms_field(j, "ts_end");
    const auto kind = str_field(j, "kind");
    if (kind == "OPENED") {
        a.kind = act::Opened{str_field(j, "app")};
    } else if (kind == "TAPPED") {
        a.kind = act::Tapped{str_field(j, "widget")};
    } else if (kind == "TYPED") {
        a.kind = act::Typed{str_field(j, "field"), str_field(j, "text")};
    } else if (kind == "SCROLLED") {
        auto dir = parse_direction(str_field(j, "direction"));
        if (!dir) malformed("bad scroll direction");
        const auto& count = field(j, "count");
        if (!count.is_number_unsigned() || count.get<std::uint64_t>() == 0) malformed("bad scroll count");
        a.kind = act::Scrolled{*dir, count.get<std::uint32_t>()};
    } else {
        malformed("unknown action kind \"" + kind + "\"");
    }
    a.description = str_field(j, "description");
    if (a.description != describe(a)) malformed("action description does not match its kind");
    const auto& events = field(j, "events");
    if (!events.is_number_unsigned()) malformed("bad event count");
    a.source_events = events.get<std::uint32_t>();
    return a;
}

double parse_double(std::string_view text, std::string_view key) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a number");
    }
    return v;
}

Millis parse_millis(std::string_view text, std::string_view key) {
    Millis v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be an integer");
    }
    return v;
}

bool parse_bool(std::string_view text, std::string_view key) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be true or false");
}

}  // namespace

ordered_json to_json(const ActionRecord& action) {
    ordered_json j;
    j["kind"] = nullptr;
    j["ts_start"] = action.ts_start;
    j["ts_end"] = action.ts_end;
    std::visit(overloaded{
                   [&](const act::Opened& a) {
                       j["kind"] = "OPENED";
                       j["app"] = a.app_id;
                   },
                   [&](const act::Tapped& a) {
                       j["kind"] = "TAPPED";
                       j["widget"] = a.widget_label;
                   },
                   [&](const act::Typed& a) {
                       j["kind"] = "TYPED";
                       j["field"] = a.field_id;
                       j["text"] = a.text;
                   },
                   [&](const act::Scrolled& a) {
                       j["kind"] = "SCROLLED";
                       j["direction"] = to_string(a.direction);
                       j["count"] = a.count;
                   },
               },
               action.kind);
    j["description"] = action.description;
    j["events"] = action.source_events;
    return j;
}

ordered_json to_json(const AppSegment& segment) {
    ordered_json j;
    j["app"] = segment.app_id;
    j["ts_start"] = segment.ts_start;
    j["ts_end"] = segment.ts_end;
    j["actions"] = ordered_json::array();
    for (const auto& a : segment.actions) j["actions"].push_back(to_json(a));
    return j;
}

ordered_json to_json(const CaptureRecord& capture) {
    ordered_json j;
    j["ts"] = capture.ts;
    j["face_detected"] = capture.face_detected();
    if (capture.best_score) j["best_score"] = *capture.best_score;
    j["sample_ref"] = capture.sample_ref;
    return j;
}

ordered_json to_json(const SessionRecord& session) {
    ordered_json j;
    j["session_id"] = session.session_id;
    j["start_ts"] = session.start_ts;
    j["end_ts"] = session.end_ts;
    j["segments"] = ordered_json::array();
    for (const auto& s : session.segments) j["segments"].push_back(to_json(s));
    j["captures"] = ordered_json::array();
    for (const auto& c : session.captures) j["captures"].push_back(to_json(c));
    j["anomalies"] = session.anomalies;
    return j;
}

ordered_json to_json(const EnrollmentProfile& profile) {
    ordered_json j;
    j["owner_id"] = profile.owner_id;
    j["created_ts"] = profile.created_ts;
    j["portraits"] = ordered_json::array();
    for (const auto& p : profile.portraits) j["portraits"].push_back(p);
    return j;
}

ordered_json to_json(const FilterConfig& config) {
    ordered_json j;
    j["threshold"] = config.threshold;
    j["aggregation"] = to_string(config.aggregation);
    j["capture_interval_ms"] = config.capture_interval_ms;
    j["coalesce_gap_ms"] = config.coalesce_gap_ms;
    j["notifications_visible"] = config.notifications_visible;
    return j;
}

SessionRecord session_from_json(const json& j) {
    SessionRecord s;
    s.session_id = str_field(j, "session_id");
    s.start_ts = ms_field(j, "start_ts");
    s.end_ts = ms_field(j, "end_ts");
    for (const auto& seg : field(j, "segments")) {
        AppSegment out{str_field(seg, "app"), ms_field(seg, "ts_start"), ms_field(seg, "ts_end"), {}};
        for (const auto& a : field(seg, "actions")) out.actions.push_back(action_from_json(a));
        s.segments.push_back(std::move(out));
    }
    for (const auto& c : field(j, "captures")) {
        CaptureRecord rec{ms_field(c, "ts"), std::nullopt, str_field(c, "sample_ref")};
        const auto& detected = field(c, "face_detected");
        if (!detected.is_boolean()) malformed("face_detected must be a boolean");
        if (detected.get<bool>()) {
            const auto& score = field(c, "best_score");
            if (!score.is_number()) malformed("best_score must be a number");
            rec.best_score = score.get<double>();
        } else if (c.contains("best_score")) {
            malformed("best_score present without a detected face");
        }
        s.captures.push_back(std::move(rec));
    }
    for (const auto& a : field(j, "anomalies")) {
        if (!a.is_string()) malformed("anomaly codes must be strings");
        s.anomalies.push_back(a.get<std::string>());
    }
    return s;
}

EnrollmentProfile profile_from_json(const json& j) {
    const auto& portraits = field(j, "portraits");
    if (!portraits.is_array()) malformed("portraits must be an array");
    std::vector<Embedding> embeddings;
    for (const auto& p : portraits) embeddings.push_back(embedding_from_json(p));
    Millis created = j.contains("created_ts") ? ms_field(j, "created_ts") : 0;
    return enroll(str_field(j, "owner_id"), embeddings, created);
}

FilterConfig config_from_json(const json& j) { return apply_config_patch(FilterConfig{}, j); }

FilterConfig apply_config_patch(FilterConfig config, const json& patch) {
    if (!patch.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be an object");
    for (const auto& [key, value] : patch.items()) {
        if (key == "threshold") {
            if (!value.is_number()) throw Error(ErrorCode::InvalidConfig, "threshold must be a number");
            config.threshold = value.get<double>();
        } else if (key == "aggregation") {
            auto agg = value.is_string() ? parse_aggregation(value.get<std::string>()) : std::nullopt;
            if (!agg) throw Error(ErrorCode::InvalidConfig, "aggregation must be any or majority");
            config.aggregation = *agg;
        } else if (key == "capture_interval_ms" || key == "coalesce_gap_ms") {
            if (!value.is_number_integer()) throw Error(ErrorCode::InvalidConfig, key + " must be an integer");
            (key == "capture_interval_ms" ? config.capture_interval_ms : config.coalesce_gap_ms) =
                value.get<Millis>();
        } else if (key == "notifications_visible") {
            if (!value.is_boolean()) throw Error(ErrorCode::InvalidConfig, key + " must be a boolean");
            config.notifications_visible = value.get<bool>();
        } else {
            throw Error(ErrorCode::InvalidConfig, "unknown config key \"" + key + "\"");
        }
    }
    config.validate();
    return config;
}

FilterConfig apply_config_setting(FilterConfig config, std::string_view key, std::string_view value) {
    if (key == "threshold") {
        config.threshold = parse_double(value, key);
    } else if (key == "aggregation") {
        auto agg = parse_aggregation(value);
        if (!agg) throw Error(ErrorCode::InvalidConfig, "aggregation must be any or majority");
        config.aggregation = *agg;
    } else if (key == "capture_interval_ms") {
        config.capture_interval_ms = parse_millis(value, key);
    } else if (key == "coalesce_gap_ms") {
        config.coalesce_gap_ms = parse_millis(value, key);
    } else if (key == "notifications_visible") {
        config.notifications_visible = parse_bool(value, key);
    } else {
        throw Error(ErrorCode::InvalidConfig, "unknown config key \"" + std::string(key) + "\"");
    }
    config.validate();
    return config;
}

std::string serialize_session(const SessionRecord& session) { return to_json(session).dump(2) + "\n"; }

}  // namespace auric
