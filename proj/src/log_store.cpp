// SPDX-License-Identifier: Apache-2.0
#include "auric/log_store.hpp"

#include "auric/codec.hpp"
#include "auric/error.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

namespace auric {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::string_view kTmpSuffix = ".tmp";

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_hex_ref(std::string_view ref) {
    return ref.size() == 64 && std::all_of(ref.begin(), ref.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

bool is_safe_id(std::string_view id) {
    return !id.empty() && id.size() < 128 && std::all_of(id.begin(), id.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-' ||
                      c == '_';
           });
}

bool summary_less(const SessionSummary& a, const SessionSummary& b) {
    if (a.start_ts != b.start_ts) return a.start_ts < b.start_ts;
    if (a.session_id.size() != b.session_id.size()) return a.session_id.size() < b.session_id.size();
    return a.session_id < b.session_id;
}

std::uintmax_t tree_bytes(const fs::path& dir) {
    std::uintmax_t total = 0;
    std::error_code ec;
    if (!fs::exists(dir, ec)) return 0;
    for (auto it = fs::recursive_directory_iterator(dir, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (it->is_regular_file()) total += it->file_size();
    }
    return total;
}

}  // namespace

SessionSummary SessionSummary::of(const SessionRecord& record) {
    std::set<std::string_view> apps;
    for (const auto& seg : record.segments) apps.insert(seg.app_id);
    return SessionSummary{record.session_id, record.start_ts, record.end_ts, record.captures.size(), apps.size(),
                          record.scores()};
}

bool is_valid_date(std::string_view date) {
    if (date.size() != 10 || date[4] != '-' || date[7] != '-') return false;
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (date[i] < '0' || date[i] > '9') return false;
    }
    const int y = std::stoi(std::string(date.substr(0, 4)));
    const unsigned m = static_cast<unsigned>(std::stoi(std::string(date.substr(5, 2))));
    const unsigned d = static_cast<unsigned>(std::stoi(std::string(date.substr(8, 2))));
    return std::chrono::year_month_day(std::chrono::year(y), std::chrono::month(m), std::chrono::day(d)).ok();
}

std::string serialize_index(const DayIndex& index) {
    ordered_json j = ordered_json::object();
    for (const auto& [date, summaries] : index) {
        auto& day = j[date] = ordered_json::array();
        for (const auto& s : summaries) {
            ordered_json e;
            e["session_id"] = s.session_id;
            e["start_ts"] = s.start_ts;
            e["end_ts"] = s.end_ts;
            e["capture_count"] = s.capture_count;
            e["app_count"] = s.app_count;
            e["scores"] = ordered_json::array();
            for (const auto& score : s.scores) {
                e["scores"].push_back(score ? ordered_json(*score) : ordered_json(nullptr));
            }
            day.push_back(std::move(e));
        }
    }
    return j.dump(2) + "\n";
}

Store::Store(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_ / "sessions", ec);
    if (!ec) fs::create_directories(root_ / "captures", ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create store at " + root_.string() + ": " + ec.message());

    // leftovers of interrupted writes are never published; drop them
    std::vector<fs::path> stale;
    for (auto it = fs::recursive_directory_iterator(root_, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (it->is_regular_file() && it->path().string().ends_with(kTmpSuffix)) stale.push_back(it->path());
    }
    for (const auto& p : stale) fs::remove(p, ec);

    DayIndex scanned = scan_sessions();
    const auto index_file = root_ / "index.json";
    const auto expected = serialize_index(scanned);
    const bool present = fs::exists(index_file);
    if ((present && read_file(index_file) != expected) || (!present && !scanned.empty())) {
        write_atomic(index_file, expected, "index");
    }
    index_ = std::move(scanned);
    for (const auto& [date, summaries] : index_) {
        for (const auto& s : summaries) id_to_date_.emplace(s.session_id, date);
    }
}

void Store::fault(std::string_view stage) const {
    if (fault_hook_) fault_hook_(stage);
}

void Store::write_atomic(const fs::path& path, std::string_view bytes, std::string_view stage) {
    fs::path tmp = path;
    tmp += kTmpSuffix;
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
            out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            out.flush();
            if (!out) throw Error(ErrorCode::IoFailure, "short write to " + tmp.string());
        }
        fault(std::string(stage) + ":before_rename");
        std::error_code ec;
        fs::rename(tmp, path, ec);
        if (ec) throw Error(ErrorCode::IoFailure, "cannot publish " + path.string() + ": " + ec.message());
    } catch (...) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw;
    }
}

fs::path Store::session_path(const std::string& date, std::string_view session_id) const {
    return root_ / "sessions" / date / (std::string(session_id) + ".json");
}

DayIndex Store::scan_sessions() const {
    DayIndex index;
    const auto dir = root_ / "sessions";
    std::error_code ec;
    for (const auto& day_entry : fs::directory_iterator(dir, ec)) {
        if (!day_entry.is_directory()) continue;
        const auto date = day_entry.path().filename().string();
        if (!is_valid_date(date)) continue;
        for (const auto& file : fs::directory_iterator(day_entry.path())) {
            if (!file.is_regular_file() || file.path().extension() != ".json") continue;
            SessionRecord record;
            try {
                record = session_from_json(json::parse(read_file(file.path())));
            } catch (const std::exception& e) {
                throw Error(ErrorCode::IoFailure, "corrupt session file " + file.path().string() + ": " + e.what());
            }
            if (record.session_id != file.path().stem().string() || utc_date(record.start_ts) != date) {
                throw Error(ErrorCode::IoFailure, "misplaced session file " + file.path().string());
            }
            index[date].push_back(SessionSummary::of(record));
        }
    }
    if (ec) throw Error(ErrorCode::IoFailure, "cannot scan sessions: " + ec.message());
    for (auto& [_, summaries] : index) std::sort(summaries.begin(), summaries.end(), summary_less);
    return index;
}

void Store::write_index(const DayIndex& index) { write_atomic(root_ / "index.json", serialize_index(index), "index"); }

std::string Store::append_session(const SessionRecord& record, const SampleBlobs& samples) {
    std::lock_guard writer(write_mutex_);
    if (!is_safe_id(record.session_id)) {
        throw Error(ErrorCode::IoFailure, "session id \"" + record.session_id + "\" is not storable");
    }
    const auto date = utc_date(record.start_ts);
    const auto path = session_path(date, record.session_id);
    if (id_to_date_.count(record.session_id) != 0 || fs::exists(path)) {
        throw Error(ErrorCode::DuplicateSession, "session " + record.session_id + " already stored");
    }

    for (const auto& capture : record.captures) {
        if (capture.sample_ref.empty()) continue;
        const auto blob_path = root_ / "captures" / (capture.sample_ref + ".bin");
        if (fs::exists(blob_path)) continue;
        auto it = samples.find(capture.sample_ref);
        if (it == samples.end()) {
            throw Error(ErrorCode::NotFound, "missing capture sample " + capture.sample_ref);
        }
        if (content_hash(it->second) != capture.sample_ref) {
            throw Error(ErrorCode::IoFailure, "capture sample does not hash to " + capture.sample_ref);
        }
        const std::string_view bytes(reinterpret_cast<const char*>(it->second.data()), it->second.size());
        write_atomic(blob_path, bytes, "capture");
    }

    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + path.parent_path().string());
    write_atomic(path, serialize_session(record), "session");

    DayIndex next = index_;
    auto& day = next[date];
    day.push_back(SessionSummary::of(record));
    std::sort(day.begin(), day.end(), summary_less);
    try {
        write_index(next);
    } catch (...) {
        fs::remove(path, ec);
        throw;
    }
    std::lock_guard lock(state_mutex_);
    index_ = std::move(next);
    id_to_date_.emplace(record.session_id, date);
    return record.session_id;
}

std::vector<DaySummary> Store::list_days(std::optional<std::string> from, std::optional<std::string> to,
                                         std::optional<FlagFilter> filter) const {
    std::lock_guard lock(state_mutex_);
    std::vector<DaySummary> out;
    for (const auto& [date, summaries] : index_) {
        if (from && date < *from) continue;
        if (to && date > *to) break;
        DaySummary day{date, summaries.size(), false};
        if (filter) {
            day.flagged = std::any_of(summaries.begin(), summaries.end(),
                                      [&](const SessionSummary& s) { return flag_scores(s.scores, *filter); });
        }
        out.push_back(std::move(day));
    }
    return out;
}

std::vector<SessionListing> Store::list_sessions(std::string_view date, std::optional<FlagFilter> filter) const {
    std::lock_guard lock(state_mutex_);
    std::vector<SessionListing> out;
    auto it = index_.find(std::string(date));
    if (it == index_.end()) return out;
    for (const auto& s : it->second) {
        out.push_back(SessionListing{s.session_id, s.start_ts, s.end_ts, filter && flag_scores(s.scores, *filter),
                                     s.capture_count, s.app_count});
    }
    return out;
}

bool Store::contains(std::string_view session_id) const {
    std::lock_guard lock(state_mutex_);
    return id_to_date_.find(session_id) != id_to_date_.end();
}

SessionRecord Store::get_session(std::string_view session_id) const {
    std::string date;
    {
        std::lock_guard lock(state_mutex_);
        auto it = id_to_date_.find(session_id);
        if (it == id_to_date_.end()) throw Error(ErrorCode::NotFound, "no session " + std::string(session_id));
        date = it->second;
    }
    return session_from_json(json::parse(read_file(session_path(date, session_id))));
}

SampleBytes Store::get_capture(std::string_view sample_ref) const {
    const auto path = root_ / "captures" / (std::string(sample_ref) + ".bin");
    if (!is_hex_ref(sample_ref) || !fs::exists(path)) {
        throw Error(ErrorCode::NotFound, "no capture " + std::string(sample_ref));
    }
    const auto bytes = read_file(path);
    return SampleBytes(bytes.begin(), bytes.end());
}

StorageUsage Store::storage_usage() const {
    StorageUsage u;
    u.total_bytes = tree_bytes(root_);
    u.sessions_bytes = tree_bytes(root_ / "sessions");
    u.captures_bytes = tree_bytes(root_ / "captures");
    std::error_code ec;
    const auto index_file = root_ / "index.json";
    if (fs::exists(index_file, ec)) u.index_bytes = fs::file_size(index_file, ec);
    return u;
}

std::uintmax_t Store::estimate(std::uint64_t future_sessions) const {
    const auto usage = storage_usage();
    const auto count = session_count();
    if (count == 0) return 0;
    return future_sessions * (usage.sessions_bytes + usage.captures_bytes) / count;
}

DayIndex Store::rebuild_index() {
    std::lock_guard writer(write_mutex_);
    DayIndex scanned = scan_sessions();
    write_index(scanned);
    std::lock_guard lock(state_mutex_);
    id_to_date_.clear();
    for (const auto& [date, summaries] : scanned) {
        for (const auto& s : summaries) id_to_date_.emplace(s.session_id, date);
    }
    index_ = scanned;
    return scanned;
}

DayIndex Store::index() const {
    std::lock_guard lock(state_mutex_);
    return index_;
}

std::size_t Store::session_count() const {
    std::lock_guard lock(state_mutex_);
    return id_to_date_.size();
}

std::optional<EnrollmentProfile> Store::profile() const {
    const auto path = root_ / "profile.json";
    if (!fs::exists(path)) return std::nullopt;
    return profile_from_json(json::parse(read_file(path)));
}

ordered_json Store::read_config_file() const {
    const auto path = root_ / "config.json";
    if (!fs::exists(path)) {
        auto j = to_json(FilterConfig{});
        j["history"] = ordered_json::array();
        return j;
    }
    return ordered_json::parse(read_file(path));
}

void Store::append_history(ordered_json entry) {
    auto file = read_config_file();
    auto& history = file["history"];
    ordered_json stamped;
    stamped["seq"] = history.size() + 1;
    for (auto& [k, v] : entry.items()) stamped[k] = v;
    history.push_back(std::move(stamped));
    write_atomic(root_ / "config.json", file.dump(2) + "\n", "config");
}

void Store::save_profile(const EnrollmentProfile& profile) {
    std::lock_guard writer(write_mutex_);
    const auto path = root_ / "profile.json";
    const bool replacing = fs::exists(path);
    write_atomic(path, to_json(profile).dump(2) + "\n", "profile");
    ordered_json event;
    event["event"] = replacing ? "re-enroll" : "enroll";
    event["owner_id"] = profile.owner_id;
    event["created_ts"] = profile.created_ts;
    append_history(std::move(event));
}

FilterConfig Store::config() const {
    auto file = read_config_file();
    file.erase("history");
    return config_from_json(json::parse(file.dump()));
}

void Store::save_config(const FilterConfig& config) {
    config.validate();
    std::lock_guard writer(write_mutex_);
    auto file = read_config_file();
    auto history = file["history"];
    file.erase("history");
    const auto previous = config_from_json(json::parse(file.dump()));
    const auto before = to_json(previous);
    auto after = to_json(config);

    ordered_json changes = ordered_json::object();
    for (auto& [k, v] : after.items()) {
        if (before[k] != v) changes[k] = v;
    }
    after["history"] = std::move(history);
    ordered_json event;
    event["seq"] = after["history"].size() + 1;
    event["event"] = "set";
    event["changes"] = std::move(changes);
    after["history"].push_back(std::move(event));
    write_atomic(root_ / "config.json", after.dump(2) + "\n", "config");
}

}  // namespace auric
