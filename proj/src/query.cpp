// SPDX-License-Identifier: Apache-2.0
#include "auric/query.hpp"

#include "auric/error.hpp"

#include <chrono>
#include <cstdio>

namespace auric {

std::optional<FlagFilter> resolve_filter(std::optional<double> threshold, std::optional<Aggregation> aggregation,
                                         const FilterConfig& config) {
    if (!threshold && !aggregation) return std::nullopt;
    FlagFilter filter{threshold.value_or(config.threshold), aggregation.value_or(config.aggregation)};
    if (!(filter.threshold >= 0.0 && filter.threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "threshold must be in [0,1]");
    }
    return filter;
}

std::vector<DaySummary> query_days(const Store& store, const DaysQuery& q) {
    for (const auto* bound : {&q.from, &q.to}) {
        if (*bound && !is_valid_date(**bound)) {
            throw Error(ErrorCode::InvalidConfig, "invalid date \"" + **bound + "\", expected YYYY-MM-DD");
        }
    }
    if (q.from && q.to && *q.from > *q.to) throw Error(ErrorCode::InvalidConfig, "from must not be after to");
    return store.list_days(q.from, q.to, resolve_filter(q.threshold, q.aggregation, store.config()));
}

std::vector<SessionListing> query_sessions(const Store& store, const SessionsQuery& q) {
    if (!is_valid_date(q.date)) {
        throw Error(ErrorCode::InvalidConfig, "invalid date \"" + q.date + "\", expected YYYY-MM-DD");
    }
    return store.list_sessions(q.date, resolve_filter(q.threshold, q.aggregation, store.config()));
}

ordered_json to_json(const DaySummary& day) {
    ordered_json j;
    j["date"] = day.date;
    j["session_count"] = day.session_count;
    j["flagged"] = day.flagged;
    return j;
}

ordered_json to_json(const SessionListing& listing) {
    ordered_json j;
    j["session_id"] = listing.session_id;
    j["start_ts"] = listing.start_ts;
    j["end_ts"] = listing.end_ts;
    j["flagged"] = listing.flagged;
    j["capture_count"] = listing.capture_count;
    j["app_count"] = listing.app_count;
    return j;
}

ordered_json to_json(const StorageUsage& usage) {
    ordered_json j;
    j["total_bytes"] = usage.total_bytes;
    j["sessions_bytes"] = usage.sessions_bytes;
    j["captures_bytes"] = usage.captures_bytes;
    j["index_bytes"] = usage.index_bytes;
    return j;
}

std::string utc_time_of_day(Millis ts) {
    using namespace std::chrono;
    const sys_time<milliseconds> tp{milliseconds(ts)};
    const auto since_midnight = tp - floor<days>(tp);
    const hh_mm_ss<milliseconds> hms(since_midnight);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d.%03d", static_cast<int>(hms.hours().count()),
                  static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()),
                  static_cast<int>(hms.subseconds().count()));
    return buf;
}

}  // namespace auric
