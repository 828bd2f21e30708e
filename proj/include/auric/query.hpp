// SPDX-License-Identifier: Apache-2.0
#pragma once

// Read-side query layer shared by the command line and the HTTP API, so both surfaces return
// the same results for the same store.

#include "auric/codec.hpp"
#include "auric/log_store.hpp"

#include <optional>
#include <string>
#include <vector>

namespace auric {

/// Resolves an optional filter from query parameters. No parameters means no filter; a
/// missing half is taken from `config`. Throws Error{InvalidConfig} for a threshold outside [0,1].
std::optional<FlagFilter> resolve_filter(std::optional<double> threshold, std::optional<Aggregation> aggregation,
                                         const FilterConfig& config);

struct DaysQuery {
    std::optional<std::string> from;
    std::optional<std::string> to;
    std::optional<double> threshold;
    std::optional<Aggregation> aggregation;
};

struct SessionsQuery {
    std::string date;
    std::optional<double> threshold;
    std::optional<Aggregation> aggregation;
};

/// Throws Error{InvalidConfig} for malformed dates or an inverted range.
std::vector<DaySummary> query_days(const Store& store, const DaysQuery& q);
std::vector<SessionListing> query_sessions(const Store& store, const SessionsQuery& q);

ordered_json to_json(const DaySummary& day);
ordered_json to_json(const SessionListing& listing);
ordered_json to_json(const StorageUsage& usage);

/// HH:MM:SS.mmm of a timestamp, UTC.
std::string utc_time_of_day(Millis ts);

}  // namespace auric
