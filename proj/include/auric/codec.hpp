// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON forms of the stored records. Key order is fixed so that serialized output is
// byte-stable.

#include "auric/face_gate.hpp"
#include "auric/session_engine.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace auric {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const ActionRecord& action);
ordered_json to_json(const AppSegment& segment);
ordered_json to_json(const CaptureRecord& capture);
ordered_json to_json(const SessionRecord& session);
ordered_json to_json(const EnrollmentProfile& profile);
ordered_json to_json(const FilterConfig& config);

// Throw Error{MalformedLine} (records) or the domain error of the type's invariant.
SessionRecord session_from_json(const nlohmann::json& j);
EnrollmentProfile profile_from_json(const nlohmann::json& j);
FilterConfig config_from_json(const nlohmann::json& j);

/// Applies the keys present in `patch` to `config` and validates the result.
FilterConfig apply_config_patch(FilterConfig config, const nlohmann::json& patch);
/// Sets one key from its textual value, as on the command line.
FilterConfig apply_config_setting(FilterConfig config, std::string_view key, std::string_view value);

/// Pretty-printed with a trailing newline; the on-disk form of a session file.
std::string serialize_session(const SessionRecord& session);

}  // namespace auric
