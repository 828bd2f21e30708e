// SPDX-License-Identifier: Apache-2.0
#include "auric/cli.hpp"

#include "auric/api.hpp"
#include "auric/codec.hpp"
#include "auric/error.hpp"
#include "auric/query.hpp"
#include "auric/scenario.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace auric {

namespace {

using json = nlohmann::json;

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string default_store() {
    const char* env = std::getenv("AURIC_STORE");
    return (env && *env) ? std::string(env) : std::string("auric-store");
}

std::string flag_marker(bool flagged) { return flagged ? "FLAGGED" : "-"; }

std::string format_score(const std::optional<double>& score) {
    if (!score) return "no-face";
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(3) << *score;
    return "score=" + ss.str();
}

std::string config_value(const ordered_json& config, const std::string& key) {
    const auto& v = config.at(key);
    return v.is_string() ? v.get<std::string>() : v.dump();
}

HttpServer* g_server = nullptr;

extern "C" void stop_server(int) {
    if (g_server) g_server->stop();
}

struct Options {
    std::string store = default_store();

    std::string portraits_file;
    std::string owner_id;

    std::string events_file;

    std::string scenario;
    std::string scenario_file;
    std::string export_file;
    std::uint64_t seed = 1;
    std::string classifier = "reference";

    std::string from;
    std::string to;
    double threshold = 0.0;
    std::string agg;
    std::string date;

    std::string session_id;
    std::uint64_t estimate = 0;

    std::string config_key;
    std::string config_value;

    std::string host = "127.0.0.1";
    int port = 8080;
};

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"auric: session logging and intrusion review for a personal device"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--store", o.store, "store directory (default $AURIC_STORE or ./auric-store)");

    auto* enroll_cmd = app.add_subcommand("enroll", "enroll the owner from a portraits file");
    enroll_cmd->add_option("portraits-file", o.portraits_file, "JSON with owner_id and three portraits")->required();
    enroll_cmd->add_option("--owner", o.owner_id, "override the owner id in the file");

    auto* ingest_cmd = app.add_subcommand("ingest", "ingest an event stream file");
    ingest_cmd->add_option("events-file", o.events_file)->required();

    auto* replay_cmd = app.add_subcommand("replay", "generate or load a scenario and replay it into the store");
    auto* scenario_opt = replay_cmd->add_option("--scenario", o.scenario, "unattended | social-share | random");
    auto* file_opt = replay_cmd->add_option("--file", o.scenario_file, "scenario file to replay");
    scenario_opt->excludes(file_opt);
    replay_cmd->add_option("--seed", o.seed);
    replay_cmd->add_option("--export", o.export_file, "also write the scenario file here");
    replay_cmd->add_option("--classifier", o.classifier)->check(CLI::IsMember({"reference", "no-face"}));

    auto* days_cmd = app.add_subcommand("days", "list days with sessions");
    days_cmd->add_option("--from", o.from, "YYYY-MM-DD");
    days_cmd->add_option("--to", o.to, "YYYY-MM-DD");
    auto* days_threshold = days_cmd->add_option("--threshold", o.threshold);
    auto* days_agg = days_cmd->add_option("--agg", o.agg)->check(CLI::IsMember({"any", "majority"}, CLI::ignore_case));

    auto* sessions_cmd = app.add_subcommand("sessions", "list sessions of a day");
    sessions_cmd->add_option("date", o.date, "YYYY-MM-DD")->required();
    auto* sessions_threshold = sessions_cmd->add_option("--threshold", o.threshold);
    auto* sessions_agg =
        sessions_cmd->add_option("--agg", o.agg)->check(CLI::IsMember({"any", "majority"}, CLI::ignore_case));

    auto* show_cmd = app.add_subcommand("show", "print one session's apps, actions and captures");
    show_cmd->add_option("session-id", o.session_id)->required();

    auto* du_cmd = app.add_subcommand("du", "storage usage");
    auto* estimate_opt = du_cmd->add_option("--estimate", o.estimate, "project storage for N more sessions");

    auto* config_cmd = app.add_subcommand("config", "read or change the filter config");
    config_cmd->require_subcommand(1);
    auto* config_get = config_cmd->add_subcommand("get");
    config_get->add_option("key", o.config_key);
    auto* config_set = config_cmd->add_subcommand("set");
    config_set->add_option("key", o.config_key)->required();
    config_set->add_option("value", o.config_value)->required();

    auto* banner_cmd = app.add_subcommand("banner", "recording notice state");
    banner_cmd->require_subcommand(1);
    auto* banner_status = banner_cmd->add_subcommand("status");

    auto* serve_cmd = app.add_subcommand("serve", "serve the HTTP API");
    serve_cmd->add_option("--port", o.port)->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--host", o.host);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (*replay_cmd && !*scenario_opt && !*file_opt) {
        err << "usage error: replay needs --scenario or --file\n";
        return kExitUsage;
    }

    try {
        Store store(o.store);

        if (*enroll_cmd) {
            auto body = json::parse(read_text(o.portraits_file), nullptr, false);
            if (body.is_discarded()) throw Error(ErrorCode::MalformedLine, "portraits file is not valid JSON");
            if (!o.owner_id.empty()) body["owner_id"] = o.owner_id;
            const auto profile = profile_from_json(body);
            store.save_profile(profile);
            out << "enrolled " << profile.owner_id << " dim=" << profile.dimension() << "\n";
        } else if (*ingest_cmd) {
            const auto profile = store.profile();
            if (!profile) throw Error(ErrorCode::MissingProfile, "no owner enrolled; run enroll first");
            auto decoded = decode_stream(read_text(o.events_file), profile->dimension());
            if (!decoded.report.ok()) {
                for (const auto& e : decoded.report.line_errors) {
                    err << o.events_file << ":" << e.line_number << ": " << e.reason << "\n";
                }
                throw Error(ErrorCode::InvalidStream, "event stream rejected");
            }
            const auto result = ingest(decoded.events, store.config(), *profile);
            for (const auto& s : result.sessions) {
                store.append_session(s, result.samples);
                out << "session " << s.session_id << " segments=" << s.segments.size()
                    << " captures=" << s.captures.size() << "\n";
            }
            for (const auto& a : result.anomalies) {
                out << "anomaly " << a.code << " ts=" << a.ts << " position=" << a.position << "\n";
            }
        } else if (*replay_cmd) {
            Scenario scenario;
            FilterConfig config = store.config();
            if (*file_opt) {
                scenario = read_scenario_file(read_text(o.scenario_file));
                config = scenario.config;
            } else {
                scenario = generate(o.scenario, o.seed, config);
            }
            if (!o.export_file.empty()) {
                std::ofstream f(o.export_file, std::ios::binary);
                f << write_scenario_file(scenario);
                if (!f) throw Error(ErrorCode::IoFailure, "cannot write " + o.export_file);
            }
            const auto classifier = o.classifier == "no-face" ? no_face_classifier() : reference_classifier();
            const auto report = replay(scenario, config, store, classifier);
            out << "replay " << scenario.name << " seed=" << scenario.seed << " " << (report.pass() ? "PASS" : "FAIL")
                << "\n";
            for (const auto& id : report.session_ids) out << "session " << id << "\n";
            for (const auto& d : report.action_diffs) out << "diff action " << d << "\n";
            for (const auto& d : report.flag_diffs) out << "diff flag " << d << "\n";
            return report.pass() ? kExitOk : kExitDomainError;
        } else if (*days_cmd) {
            DaysQuery q;
            if (!o.from.empty()) q.from = o.from;
            if (!o.to.empty()) q.to = o.to;
            if (*days_threshold) q.threshold = o.threshold;
            if (*days_agg) q.aggregation = parse_aggregation(o.agg);
            for (const auto& d : query_days(store, q)) {
                out << d.date << "\tsessions=" << d.session_count << "\t" << flag_marker(d.flagged) << "\n";
            }
        } else if (*sessions_cmd) {
            SessionsQuery q{o.date, std::nullopt, std::nullopt};
            if (*sessions_threshold) q.threshold = o.threshold;
            if (*sessions_agg) q.aggregation = parse_aggregation(o.agg);
            for (const auto& s : query_sessions(store, q)) {
                out << s.session_id << "\t" << utc_time_of_day(s.start_ts) << "\t" << utc_time_of_day(s.end_ts)
                    << "\tcaptures=" << s.capture_count << "\tapps=" << s.app_count << "\t" << flag_marker(s.flagged)
                    << "\n";
            }
        } else if (*show_cmd) {
            const auto s = store.get_session(o.session_id);
            out << "session " << s.session_id << "\n";
            out << "span " << utc_date(s.start_ts) << " " << utc_time_of_day(s.start_ts) << " - "
                << utc_time_of_day(s.end_ts) << "\n";
            for (std::size_t i = 0; i < s.captures.size(); ++i) {
                const auto& c = s.captures[i];
                out << "capture " << i << " " << utc_time_of_day(c.ts) << " " << format_score(c.best_score) << " "
                    << (c.sample_ref.empty() ? "-" : c.sample_ref) << "\n";
            }
            for (const auto& seg : s.segments) {
                out << "app " << seg.app_id << " " << utc_time_of_day(seg.ts_start) << " - "
                    << utc_time_of_day(seg.ts_end) << "\n";
                for (const auto& a : seg.actions) out << "  " << utc_time_of_day(a.ts_start) << " " << a.description << "\n";
            }
            for (const auto& a : s.anomalies) out << "anomaly " << a << "\n";
        } else if (*du_cmd) {
            const auto u = store.storage_usage();
            out << "total_bytes=" << u.total_bytes << "\n"
                << "sessions_bytes=" << u.sessions_bytes << "\n"
                << "captures_bytes=" << u.captures_bytes << "\n"
                << "index_bytes=" << u.index_bytes << "\n";
            if (*estimate_opt) out << "estimate sessions=" << o.estimate << " bytes=" << store.estimate(o.estimate) << "\n";
        } else if (*config_cmd) {
            if (*config_set) {
                const auto updated = apply_config_setting(store.config(), o.config_key, o.config_value);
                store.save_config(updated);
            }
            const auto j = to_json(store.config());
            if (!o.config_key.empty()) {
                if (!j.contains(o.config_key)) {
                    throw Error(ErrorCode::InvalidConfig, "unknown config key \"" + o.config_key + "\"");
                }
                out << o.config_key << "=" << config_value(j, o.config_key) << "\n";
            } else {
                for (const auto& [key, _] : j.items()) out << key << "=" << config_value(j, key) << "\n";
            }
        } else if (*banner_cmd && *banner_status) {
            out << (store.config().notifications_visible ? "visible" : "hidden") << "\n";
        } else if (*serve_cmd) {
            HttpServer server(store);
            g_server = &server;
            std::signal(SIGINT, stop_server);
            std::signal(SIGTERM, stop_server);
            const bool ok = server.listen(o.host, o.port, [&](int port) {
                out << "serving " << store.root().string() << " on http://" << o.host << ":" << port << "\n"
                    << std::flush;
            });
            g_server = nullptr;
            if (!ok) throw Error(ErrorCode::IoFailure, "cannot listen on " + o.host + ":" + std::to_string(o.port));
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomainError;
    }
    return kExitOk;
}

}  // namespace auric
