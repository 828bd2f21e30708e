// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scripted attack scenarios and their replay against a store.
//
// Builtin scenarios:
//   unattended   - someone unlocks the unattended device, browses messages, email and browser
//                  history, and locks it again. Every capture shows the intruder.
//   social-share - the owner opens a picture in the gallery and hands the device over; the other
//                  person flips to another picture and shares it by email, then hands it back.
//   random       - fuzz stream with several sessions and out-of-session noise.
//
// Intruder embeddings lie in a subspace orthogonal to every owner portrait, so their best score
// is exactly 0 and flag outcomes follow from the script rather than from tuning.

#include "auric/event.hpp"
#include "auric/face_gate.hpp"
#include "auric/log_store.hpp"
#include "auric/session_engine.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace auric {

struct ExpectedSession {
    std::vector<std::string> apps;                  // segment order
    std::vector<std::vector<std::string>> actions;  // descriptions per segment
    std::size_t capture_count = 0;
    friend bool operator==(const ExpectedSession&, const ExpectedSession&) = default;
};

struct ExpectedDay {
    std::string date;
    bool flagged = false;
    friend bool operator==(const ExpectedDay&, const ExpectedDay&) = default;
};

struct FlagExpectation {
    FlagFilter filter;
    std::vector<bool> sessions;
    std::vector<ExpectedDay> days;
    friend bool operator==(const FlagExpectation&, const FlagExpectation&) = default;
};

struct Fixture {
    std::vector<ExpectedSession> sessions;
    std::vector<FlagExpectation> flags;
    friend bool operator==(const Fixture&, const Fixture&) = default;
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    FilterConfig config;  // config the stream and fixture were generated for
    EnrollmentProfile owner_profile;
    std::vector<RawEvent> events;
    Fixture expected;
    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Filters every fixture records outcomes for: thresholds {0, 0.6, config.threshold} under
/// both aggregations.
std::vector<FlagFilter> fixture_filters(const FilterConfig& config);

/// Deterministic per (name, seed, config). Throws Error{UnknownScenario}.
Scenario generate(std::string_view name, std::uint64_t seed, const FilterConfig& config = {});

/// Recomputes a fixture from the events through ingest and the flag rules.
Fixture derive_fixture(std::span<const RawEvent> events, const FilterConfig& config,
                       const EnrollmentProfile& profile, const Classifier& classifier = reference_classifier());

struct ReplayReport {
    std::vector<std::string> session_ids;
    std::vector<std::string> action_diffs;  // session/app/action log mismatches
    std::vector<std::string> flag_diffs;    // flag outcome mismatches

    bool pass() const noexcept { return action_diffs.empty() && flag_diffs.empty(); }
};

/// Ingests the scenario into the store and checks the fixture against store queries. A store
/// without a profile is enrolled with the scenario's owner; a different profile is
/// Error{ProfileMismatch}.
ReplayReport replay(const Scenario& scenario, const FilterConfig& config, Store& store,
                    const Classifier& classifier = reference_classifier());

/// Scenario file: JSON header, one blank line, then the event stream.
std::string write_scenario_file(const Scenario& scenario);
Scenario read_scenario_file(std::string_view text);

}  // namespace auric
