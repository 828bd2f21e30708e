// SPDX-License-Identifier: Apache-2.0
#pragma once

// Append-only, day-indexed session store.
//
// Layout under the root directory:
//   profile.json                         enrollment profile
//   config.json                          filter config plus config-event history
//   sessions/YYYY-MM-DD/<session_id>.json one immutable file per session
//   captures/<sha256>.bin                content-addressed capture samples
//   index.json                           date -> session summaries, derivable from sessions/
//
// Every file is published by write-to-temp then rename, so readers only ever observe
// complete files. One writer, any number of readers.

#include "auric/face_gate.hpp"
#include "auric/session_engine.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace auric {

struct SessionSummary {
    std::string session_id;
    Millis start_ts = 0;
    Millis end_ts = 0;
    std::size_t capture_count = 0;
    std::size_t app_count = 0;  // distinct apps
    std::vector<std::optional<double>> scores;

    static SessionSummary of(const SessionRecord& record);
    friend bool operator==(const SessionSummary&, const SessionSummary&) = default;
};

/// date (YYYY-MM-DD, UTC) -> summaries ordered by start time.
using DayIndex = std::map<std::string, std::vector<SessionSummary>>;

struct DaySummary {
    std::string date;
    std::size_t session_count = 0;
    bool flagged = false;
    friend bool operator==(const DaySummary&, const DaySummary&) = default;
};

struct SessionListing {
    std::string session_id;
    Millis start_ts = 0;
    Millis end_ts = 0;
    bool flagged = false;
    std::size_t capture_count = 0;
    std::size_t app_count = 0;
    friend bool operator==(const SessionListing&, const SessionListing&) = default;
};

struct StorageUsage {
    std::uintmax_t total_bytes = 0;
    std::uintmax_t sessions_bytes = 0;
    std::uintmax_t captures_bytes = 0;
    std::uintmax_t index_bytes = 0;
    friend bool operator==(const StorageUsage&, const StorageUsage&) = default;
};

/// True for a well-formed YYYY-MM-DD calendar date.
bool is_valid_date(std::string_view date);

class Store {
public:
    /// Opens (creating directories if needed) and reconciles index.json with the session files.
    explicit Store(std::filesystem::path root);

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    const std::filesystem::path& root() const noexcept { return root_; }

    /// Throws Error{DuplicateSession} or Error{IoFailure}; on failure nothing is published.
    /// Every capture sample_ref must be in `samples` or already stored.
    std::string append_session(const SessionRecord& record, const SampleBlobs& samples = {});

    /// Days in [from, to] (inclusive, either bound optional) that hold sessions, ascending.
    std::vector<DaySummary> list_days(std::optional<std::string> from, std::optional<std::string> to,
                                      std::optional<FlagFilter> filter = std::nullopt) const;
    /// Chronological; empty for unknown dates.
    std::vector<SessionListing> list_sessions(std::string_view date,
                                              std::optional<FlagFilter> filter = std::nullopt) const;

    /// Throws Error{NotFound}.
    SessionRecord get_session(std::string_view session_id) const;
    SampleBytes get_capture(std::string_view sample_ref) const;
    bool contains(std::string_view session_id) const;

    StorageUsage storage_usage() const;
    std::uintmax_t estimate(std::uint64_t future_sessions) const;

    /// Rescans sessions/ and rewrites index.json; returns the rebuilt index.
    DayIndex rebuild_index();
    DayIndex index() const;
    std::size_t session_count() const;

    std::optional<EnrollmentProfile> profile() const;
    /// Replaces the profile and records an enroll event in the config history.
    void save_profile(const EnrollmentProfile& profile);

    FilterConfig config() const;
    /// Validates, persists and records the change in the config history.
    void save_config(const FilterConfig& config);

    /// Test hook invoked at named points of a write (e.g. "session:before_rename"); a throwing
    /// hook simulates a crash at that point.
    void set_fault_hook(std::function<void(std::string_view)> hook) { fault_hook_ = std::move(hook); }

private:
    DayIndex scan_sessions() const;
    void write_index(const DayIndex& index);
    void write_atomic(const std::filesystem::path& path, std::string_view bytes, std::string_view stage);
    void fault(std::string_view stage) const;
    void append_history(nlohmann::ordered_json entry);
    nlohmann::ordered_json read_config_file() const;
    std::filesystem::path session_path(const std::string& date, std::string_view session_id) const;

    std::filesystem::path root_;
    DayIndex index_;
    std::map<std::string, std::string, std::less<>> id_to_date_;
    mutable std::mutex state_mutex_;  // index_, id_to_date_; never held across file I/O
    std::mutex write_mutex_;          // one writer at a time
    std::function<void(std::string_view)> fault_hook_;
};

/// index.json content for an index.
std::string serialize_index(const DayIndex& index);

}  // namespace auric
