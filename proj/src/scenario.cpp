// SPDX-License-Identifier: Apache-2.0
#include "auric/scenario.hpp"

#include "auric/codec.hpp"
#include "auric/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace auric {

using json = nlohmann::json;

namespace {

// 2024-03-14T09:00:00Z
constexpr Millis kScenarioBase = 1710406800000;
constexpr std::size_t kScenarioDim = 8;
constexpr std::size_t kOwnerDims = 4;  // owner faces live in dims [0,4), intruders in [4,8)

// Portable draws: std distributions are implementation-defined, the engine is not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * unit() - 1.0; }
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool chance(double p) { return unit() < p; }
    template <typename T>
    T pick(const std::vector<T>& items) {
        return items[static_cast<std::size_t>(between(0, static_cast<std::int64_t>(items.size()) - 1))];
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t scenario_seed(std::string_view name, std::uint64_t seed) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h ^ (seed * 0x9E3779B97F4A7C15ULL);
}

Embedding normalized(Embedding v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
    return v;
}

/// Random unit vector supported on dims [lo, hi) of a `dim`-dimensional space.
Embedding random_unit(Rng& rng, std::size_t dim, std::size_t lo, std::size_t hi) {
    Embedding v(dim, 0.0);
    double n = 0.0;
    while (n < 1e-3) {
        n = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            v[i] = rng.symmetric();
            n += v[i] * v[i];
        }
    }
    return normalized(std::move(v));
}

/// The builtin scenarios share one owner so they can be replayed into the same store.
EnrollmentProfile scenario_profile() {
    Rng rng(scenario_seed("owner", 0));
    std::vector<Embedding> portraits;
    for (std::size_t i = 0; i < kPortraitCount; ++i) {
        portraits.push_back(random_unit(rng, kScenarioDim, 0, kOwnerDims));
    }
    return enroll("owner", portraits, kScenarioBase - 86'400'000);
}

/// Owner face: a portrait nudged within the owner subspace.
Embedding owner_face(Rng& rng, const EnrollmentProfile& profile) {
    const auto& p = profile.portraits[static_cast<std::size_t>(rng.between(0, kPortraitCount - 1))];
    const auto noise = random_unit(rng, kScenarioDim, 0, kOwnerDims);
    Embedding v(kScenarioDim);
    for (std::size_t i = 0; i < kScenarioDim; ++i) v[i] = p[i] + 0.15 * noise[i];
    return normalized(std::move(v));
}

Embedding intruder_face(Rng& rng) { return random_unit(rng, kScenarioDim, kOwnerDims, kScenarioDim); }

double best_dot(const Embedding& face, const EnrollmentProfile& profile) {
    double best = 0.0;
    for (const auto& p : profile.portraits) {
        double dot = 0.0;
        for (std::size_t i = 0; i < face.size(); ++i) dot += face[i] * p[i];
        best = std::max(best, std::min(1.0, dot));
    }
    return best;
}

/// Builds an event stream from high-level steps while keeping the action log the steps are
/// expected to produce.
class ScriptBuilder {
public:
    ScriptBuilder(Rng& rng, const FilterConfig& config, Millis start) : rng_(rng), config_(config), now_(start) {
        push(ev::Unlock{});
        start_ = start;
    }

    Millis now() const noexcept { return now_; }

    void pause(Millis lo, Millis hi) { now_ += rng_.between(lo, hi); }

    void open(const std::string& app, const std::string& title) {
        pause(700, 1800);
        push(ev::WindowState{app, title});
        expected_.apps.push_back(app);
        expected_.actions.push_back({"Opened " + app});
        app_ = app;
    }

    void tap(const std::string& label) {
        pause(600, 2200);
        push(ev::ViewClick{app_, label});
        log("Tapped \"" + label + "\"");
    }

    void scroll(ScrollDirection dir, int count) {
        pause(600, 1500);
        for (int i = 0; i < count; ++i) {
            if (i > 0) pause(150, 700);
            push(ev::Scroll{app_, dir});
        }
        log("Scrolled " + std::string(to_string(dir)) + " ×" + std::to_string(count));
    }

    /// Types `text` one character per event, optionally with a corrected typo.
    void type(const std::string& field, const std::string& text, bool typo) {
        pause(600, 1500);
        const Millis max_gap = std::max<Millis>(1, std::min<Millis>(350, config_.coalesce_gap_ms));
        const auto typo_at = typo ? static_cast<std::size_t>(rng_.between(0, static_cast<std::int64_t>(text.size()) - 1))
                                  : text.size();
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (i > 0) now_ += rng_.between(1, max_gap);
            if (i == typo_at) {
                push(ev::TextChange{app_, field, "x"});
                now_ += rng_.between(1, max_gap);
                push(ev::TextChange{app_, field, std::string(kBackspace)});
                now_ += rng_.between(1, max_gap);
            }
            push(ev::TextChange{app_, field, text.substr(i, 1)});
        }
        log("Typed \"" + text + "\" in " + field);
    }

    /// Declares who holds the device from now on.
    void holder(bool intruder) { phases_.push_back({now_, intruder}); }

    /// Closes the session, placing one CAPTURE per scheduled time with the then-current
    /// holder's face. Returns the stream and fills `expected` and the nominal scores.
    std::vector<RawEvent> finish(const EnrollmentProfile& profile, ExpectedSession& expected,
                                 std::vector<std::optional<double>>& scores) {
        pause(800, 2500);
        const Millis end = now_;
        std::vector<RawEvent> out;
        const auto times = compute_capture_times(start_, end, config_.capture_interval_ms);
        std::size_t next = 0;
        auto emit_captures_until = [&](Millis limit) {
            while (next < times.size() && times[next] <= limit) {
                const Millis t = times[next++];
                bool intruder = false;
                for (const auto& [from, who] : phases_) {
                    if (from <= t) intruder = who;
                }
                auto face = intruder ? intruder_face(rng_) : owner_face(rng_, profile);
                scores.push_back(best_dot(face, profile));
                out.push_back(RawEvent{t, ev::Capture{CaptureSample{std::move(face)}}});
            }
        };
        out.push_back(events_.front());  // UNLOCK
        emit_captures_until(start_);
        for (std::size_t i = 1; i < events_.size(); ++i) {
            emit_captures_until(events_[i].ts - 1);
            out.push_back(events_[i]);
        }
        emit_captures_until(end);
        out.push_back(RawEvent{end, ev::ScreenOff{}});
        expected_.capture_count = times.size();
        expected = expected_;
        return out;
    }

private:
    void push(EventPayload payload) { events_.push_back(RawEvent{now_, std::move(payload)}); }
    void log(std::string description) { expected_.actions.back().push_back(std::move(description)); }

    Rng& rng_;
    const FilterConfig& config_;
    Millis now_;
    Millis start_ = 0;
    std::string app_;
    std::vector<RawEvent> events_;
    std::vector<std::pair<Millis, bool>> phases_;
    ExpectedSession expected_;
};

Fixture fixture_from_script(const ExpectedSession& session, const std::vector<std::optional<double>>& scores,
                            Millis start, const FilterConfig& config) {
    Fixture fx;
    fx.sessions.push_back(session);
    for (const auto& filter : fixture_filters(config)) {
        const bool flagged = flag_scores(scores, filter);
        fx.flags.push_back(FlagExpectation{filter, {flagged}, {ExpectedDay{utc_date(start), flagged}}});
    }
    return fx;
}

Scenario make_unattended(Rng& rng, std::uint64_t seed, const FilterConfig& config) {
    Scenario sc{"unattended", seed, config, scenario_profile(), {}, {}};
    const Millis start = kScenarioBase + rng.between(0, 6 * 3600) * 1000;
    ScriptBuilder script(rng, config, start);
    script.holder(true);

    script.open("messages", "Messages");
    script.scroll(ScrollDirection::Down, static_cast<int>(rng.between(2, 5)));
    script.tap(rng.pick<std::string>({"Conversation with Alex", "Conversation with Sam", "Conversation with Mom"}));
    script.scroll(ScrollDirection::Up, static_cast<int>(rng.between(2, 4)));
    script.tap("Back");
    script.tap(rng.pick<std::string>({"Conversation with Jordan", "Conversation with Kim"}));
    script.scroll(ScrollDirection::Down, static_cast<int>(rng.between(1, 3)));

    script.open("email", "Inbox");
    script.scroll(ScrollDirection::Down, static_cast<int>(rng.between(2, 6)));
    script.tap(rng.pick<std::string>({"Re: Weekend plans", "Your bank statement", "Flight itinerary"}));
    script.scroll(ScrollDirection::Down, static_cast<int>(rng.between(1, 4)));
    script.tap("Back");

    script.open("browser", "Browser");
    script.tap("History");
    script.scroll(ScrollDirection::Down, static_cast<int>(rng.between(2, 5)));
    script.tap(rng.pick<std::string>({"news.example.com", "clinic.example.org", "jobs.example.net"}));

    std::vector<std::optional<double>> scores;
    ExpectedSession expected;
    sc.events = script.finish(sc.owner_profile, expected, scores);
    sc.expected = fixture_from_script(expected, scores, start, config);
    return sc;
}

Scenario make_social_share(Rng& rng, std::uint64_t seed, const FilterConfig& config) {
    Scenario sc{"social-share", seed, config, scenario_profile(), {}, {}};
    const Millis start = kScenarioBase + rng.between(0, 6 * 3600) * 1000;
    ScriptBuilder script(rng, config, start);
    script.holder(false);
    script.open("gallery", "Photos");
    // the owner shows the picture for a while before handing the device over
    script.pause(5000, 25000);

    script.holder(true);
    const auto flips = rng.between(1, 3);
    for (std::int64_t i = 0; i < flips; ++i) script.tap("Next");
    script.tap("Share");
    script.tap("Email");
    script.type("recipient", rng.pick<std::string>({"alex@example.com", "sam.k@example.org", "j.doe@example.net"}),
                rng.chance(0.5));
    script.tap("Send");
    script.pause(1000, 4000);

    script.holder(false);
    script.pause(0, 15000);

    std::vector<std::optional<double>> scores;
    ExpectedSession expected;
    sc.events = script.finish(sc.owner_profile, expected, scores);
    sc.expected = fixture_from_script(expected, scores, start, config);
    return sc;
}

Scenario make_random(Rng& rng, std::uint64_t seed, const FilterConfig& config) {
    const auto dim = static_cast<std::size_t>(rng.between(2, 8));
    std::vector<Embedding> portraits;
    for (std::size_t i = 0; i < kPortraitCount; ++i) portraits.push_back(random_unit(rng, dim, 0, dim));
    Scenario sc{"random", seed, config, enroll("owner", portraits, kScenarioBase), {}, {}};

    const std::vector<std::string> apps{"messages", "email", "browser", "gallery", "notes"};
    const std::vector<std::string> fields{"body", "to", "search"};
    const std::vector<std::string> labels{"Next", "Back", "Send", "Share", "OK"};
    const std::vector<std::string> chars{"a", "b", "c", " ", "é", "\b", "\b", "hi"};

    Millis t = kScenarioBase + rng.between(0, 86'399) * 1000;
    auto step = [&] {
        const auto r = rng.unit();
        t += r < 0.1 ? 0 : (r < 0.8 ? rng.between(1, 2500) : rng.between(2500, 20000));
    };
    auto random_app_event = [&]() -> EventPayload {
        const auto& app = rng.pick(apps);
        const auto r = rng.unit();
        if (r < 0.2) return ev::WindowState{app, "Window"};
        if (r < 0.4) return ev::ViewClick{app, rng.pick(labels)};
        if (r < 0.75) return ev::TextChange{app, rng.pick(fields), rng.pick(chars)};
        return ev::Scroll{app, rng.chance(0.5) ? ScrollDirection::Up : ScrollDirection::Down};
    };
    auto random_capture = [&]() -> EventPayload {
        const auto r = rng.unit();
        if (r < 0.25) return ev::Capture{};
        if (r < 0.6) {
            const auto& p = sc.owner_profile.portraits[static_cast<std::size_t>(rng.between(0, 2))];
            const auto noise = random_unit(rng, dim, 0, dim);
            Embedding v(dim);
            const double eps = rng.unit() * 0.5;
            for (std::size_t i = 0; i < dim; ++i) v[i] = p[i] + eps * noise[i];
            return ev::Capture{CaptureSample{normalized(std::move(v))}};
        }
        return ev::Capture{CaptureSample{random_unit(rng, dim, 0, dim)}};
    };

    const auto sessions = rng.between(1, 4);
    for (std::int64_t s = 0; s < sessions; ++s) {
        for (auto noise = rng.between(0, 2); noise > 0; --noise) {
            step();
            sc.events.push_back({t, rng.chance(0.3) ? EventPayload(ev::ScreenOff{}) : random_app_event()});
        }
        step();
        sc.events.push_back({t, ev::Unlock{}});
        for (auto body = rng.between(0, 40); body > 0; --body) {
            step();
            const auto r = rng.unit();
            EventPayload payload = r < 0.15 ? random_capture() : (r < 0.18 ? EventPayload(ev::Unlock{}) : random_app_event());
            sc.events.push_back({t, std::move(payload)});
        }
        const bool truncated = s + 1 == sessions && rng.chance(0.2);
        if (!truncated) {
            step();
            sc.events.push_back({t, ev::ScreenOff{}});
        }
    }
    sc.expected = derive_fixture(sc.events, config, sc.owner_profile);
    return sc;
}

ordered_json fixture_to_json(const Fixture& fx) {
    ordered_json j;
    j["sessions"] = ordered_json::array();
    for (const auto& s : fx.sessions) {
        ordered_json e;
        e["apps"] = s.apps;
        e["actions"] = s.actions;
        e["capture_count"] = s.capture_count;
        j["sessions"].push_back(std::move(e));
    }
    j["flags"] = ordered_json::array();
    for (const auto& f : fx.flags) {
        ordered_json e;
        e["threshold"] = f.filter.threshold;
        e["aggregation"] = to_string(f.filter.aggregation);
        e["sessions"] = f.sessions;
        e["days"] = ordered_json::array();
        for (const auto& d : f.days) e["days"].push_back(ordered_json{{"date", d.date}, {"flagged", d.flagged}});
        j["flags"].push_back(std::move(e));
    }
    return j;
}

Fixture fixture_from_json(const json& j) {
    Fixture fx;
    for (const auto& s : j.at("sessions")) {
        fx.sessions.push_back(ExpectedSession{s.at("apps").get<std::vector<std::string>>(),
                                              s.at("actions").get<std::vector<std::vector<std::string>>>(),
                                              s.at("capture_count").get<std::size_t>()});
    }
    for (const auto& f : j.at("flags")) {
        auto agg = parse_aggregation(f.at("aggregation").get<std::string>());
        if (!agg) throw Error(ErrorCode::MalformedLine, "bad aggregation in fixture");
        FlagExpectation fe{FlagFilter{f.at("threshold").get<double>(), *agg}, f.at("sessions").get<std::vector<bool>>(),
                           {}};
        for (const auto& d : f.at("days")) {
            fe.days.push_back(ExpectedDay{d.at("date").get<std::string>(), d.at("flagged").get<bool>()});
        }
        fx.flags.push_back(std::move(fe));
    }
    return fx;
}

std::string join(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        out += items[i];
    }
    return out + "]";
}

std::string filter_label(const FlagFilter& f) {
    return "threshold=" + ordered_json(f.threshold).dump() + " agg=" + std::string(to_string(f.aggregation));
}

}  // namespace

std::vector<FlagFilter> fixture_filters(const FilterConfig& config) {
    std::vector<double> thresholds{0.0, 0.6};
    if (std::find(thresholds.begin(), thresholds.end(), config.threshold) == thresholds.end()) {
        thresholds.push_back(config.threshold);
    }
    std::vector<FlagFilter> out;
    for (double t : thresholds) {
        out.push_back({t, Aggregation::Any});
        out.push_back({t, Aggregation::Majority});
    }
    return out;
}

Scenario generate(std::string_view name, std::uint64_t seed, const FilterConfig& config) {
    config.validate();
    Rng rng(scenario_seed(name, seed));
    if (name == "unattended") return make_unattended(rng, seed, config);
    if (name == "social-share") return make_social_share(rng, seed, config);
    if (name == "random") return make_random(rng, seed, config);
    throw Error(ErrorCode::UnknownScenario, "unknown scenario \"" + std::string(name) + "\"");
}

Fixture derive_fixture(std::span<const RawEvent> events, const FilterConfig& config, const EnrollmentProfile& profile,
                       const Classifier& classifier) {
    const auto result = ingest(events, config, profile, classifier);
    Fixture fx;
    for (const auto& s : result.sessions) {
        ExpectedSession e;
        for (const auto& seg : s.segments) {
            e.apps.push_back(seg.app_id);
            auto& descriptions = e.actions.emplace_back();
            for (const auto& a : seg.actions) descriptions.push_back(a.description);
        }
        e.capture_count = s.captures.size();
        fx.sessions.push_back(std::move(e));
    }
    for (const auto& filter : fixture_filters(config)) {
        FlagExpectation fe{filter, {}, {}};
        std::map<std::string, bool> days;
        for (const auto& s : result.sessions) {
            const bool flagged = flag_session(s, filter);
            fe.sessions.push_back(flagged);
            days[utc_date(s.start_ts)] |= flagged;
        }
        for (const auto& [date, flagged] : days) fe.days.push_back({date, flagged});
        fx.flags.push_back(std::move(fe));
    }
    return fx;
}

ReplayReport replay(const Scenario& scenario, const FilterConfig& config, Store& store, const Classifier& classifier) {
    if (auto existing = store.profile()) {
        if (*existing != scenario.owner_profile) {
            throw Error(ErrorCode::ProfileMismatch, "store is enrolled for a different owner profile");
        }
    } else {
        store.save_profile(scenario.owner_profile);
    }

    const auto result = ingest(scenario.events, config, scenario.owner_profile, classifier);
    ReplayReport report;
    for (const auto& s : result.sessions) report.session_ids.push_back(store.append_session(s, result.samples));

    const auto& expected = scenario.expected;
    if (expected.sessions.size() != report.session_ids.size()) {
        report.action_diffs.push_back("session count: expected " + std::to_string(expected.sessions.size()) +
                                      ", got " + std::to_string(report.session_ids.size()));
    }
    const auto n = std::min(expected.sessions.size(), report.session_ids.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& id = report.session_ids[i];
        const auto stored = store.get_session(id);
        const auto& want = expected.sessions[i];
        std::vector<std::string> apps;
        for (const auto& seg : stored.segments) apps.push_back(seg.app_id);
        if (apps != want.apps) {
            report.action_diffs.push_back(id + " apps: expected " + join(want.apps) + ", got " + join(apps));
        }
        for (std::size_t k = 0; k < std::min(apps.size(), want.apps.size()); ++k) {
            std::vector<std::string> got;
            for (const auto& a : stored.segments[k].actions) got.push_back(a.description);
            if (k < want.actions.size() && got != want.actions[k]) {
                report.action_diffs.push_back(id + " segment " + std::to_string(k) + " (" + apps[k] +
                                              ") actions: expected " + join(want.actions[k]) + ", got " + join(got));
            }
        }
        if (stored.captures.size() != want.capture_count) {
            report.action_diffs.push_back(id + " captures: expected " + std::to_string(want.capture_count) + ", got " +
                                          std::to_string(stored.captures.size()));
        }
    }

    for (const auto& fe : expected.flags) {
        for (std::size_t i = 0; i < std::min(n, fe.sessions.size()); ++i) {
            const auto& id = report.session_ids[i];
            const auto listing = store.list_sessions(utc_date(result.sessions[i].start_ts), fe.filter);
            auto it = std::find_if(listing.begin(), listing.end(),
                                   [&](const SessionListing& l) { return l.session_id == id; });
            if (it == listing.end()) {
                report.action_diffs.push_back(id + " missing from its day listing");
            } else if (it->flagged != fe.sessions[i]) {
                report.flag_diffs.push_back(id + " " + filter_label(fe.filter) + ": expected flagged=" +
                                            (fe.sessions[i] ? "true" : "false"));
            }
        }
        for (const auto& day : fe.days) {
            // sessions already in the store on that day count toward its mark too
            bool want = day.flagged;
            for (const auto& l : store.list_sessions(day.date, fe.filter)) {
                const bool ours = std::find(report.session_ids.begin(), report.session_ids.end(), l.session_id) !=
                                  report.session_ids.end();
                if (!ours) want = want || l.flagged;
            }
            const auto days = store.list_days(day.date, day.date, fe.filter);
            if (days.empty()) {
                report.action_diffs.push_back("day " + day.date + " not listed");
            } else if (days.front().flagged != want) {
                report.flag_diffs.push_back("day " + day.date + " " + filter_label(fe.filter) + ": expected flagged=" +
                                            (want ? "true" : "false"));
            }
        }
    }
    return report;
}

std::string write_scenario_file(const Scenario& scenario) {
    ordered_json header;
    header["name"] = scenario.name;
    header["seed"] = scenario.seed;
    header["config"] = to_json(scenario.config);
    header["profile"] = to_json(scenario.owner_profile);
    header["expected"] = fixture_to_json(scenario.expected);
    return header.dump(2) + "\n\n" + encode_stream(scenario.events);
}

Scenario read_scenario_file(std::string_view text) {
    const auto split = text.find("\n\n");
    if (split == std::string_view::npos) throw Error(ErrorCode::MalformedLine, "scenario file has no header separator");
    Scenario sc;
    try {
        const auto header = json::parse(text.substr(0, split));
        sc.name = header.at("name").get<std::string>();
        sc.seed = header.value("seed", std::uint64_t{0});
        if (header.contains("config")) sc.config = config_from_json(header.at("config"));
        sc.owner_profile = profile_from_json(header.at("profile"));
        sc.expected = fixture_from_json(header.at("expected"));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedLine, std::string("bad scenario header: ") + e.what());
    }
    auto decoded = decode_stream(text.substr(split + 2), sc.owner_profile.dimension());
    if (!decoded.report.ok()) {
        const auto& first = decoded.report.line_errors.front();
        throw Error(ErrorCode::InvalidStream, "scenario event " + std::to_string(first.line_number) + ": " + first.reason);
    }
    sc.events = std::move(decoded.events);
    return sc;
}

}  // namespace auric
