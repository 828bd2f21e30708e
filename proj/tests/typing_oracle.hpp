// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force typing simulator and the random app-event bodies it is checked against.

#include "test_support.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace auric::test {

inline std::vector<RawEvent> random_body(std::mt19937_64& rng, std::size_t n, Millis gap_ms) {
    const std::vector<std::string> apps{"messages", "email", "browser"};
    const std::vector<std::string> fields{"body", "to"};
    const std::vector<std::string> deltas{"a", "b", "é", "\b", "\b", "xy", "✓"};
    std::vector<RawEvent> out;
    Millis t = 1000;
    std::string app = apps[rng() % apps.size()];
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = rng() % 100;
        t += r < 10 ? 0 : (r < 85 ? static_cast<Millis>(rng() % gap_ms) : gap_ms + static_cast<Millis>(rng() % 3000));
        if (rng() % 8 == 0) app = apps[rng() % apps.size()];
        switch (rng() % 6) {
            case 0: out.push_back(window(t, app)); break;
            case 1: out.push_back(click(t, app, "OK")); break;
            case 2: out.push_back(scroll(t, app, rng() % 2 ? ScrollDirection::Up : ScrollDirection::Down)); break;
            default: out.push_back(text(t, app, fields[rng() % fields.size()], deltas[rng() % deltas.size()]));
        }
    }
    return out;
}

inline std::vector<std::string> code_points(std::string_view s) {
    std::vector<std::string> out;
    for (char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0U) == 0x80U && !out.empty()) {
            out.back().push_back(c);
        } else {
            out.emplace_back(1, c);
        }
    }
    return out;
}

/// Character-by-character typing simulator. Returns, per (app, field), the texts of each typing
/// run in order, plus the conservation totals.
struct TypingOracle {
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> runs;
    std::map<std::pair<std::string, std::string>, long> typed_chars;       // non-backspace characters
    std::map<std::pair<std::string, std::string>, long> effective_erases;  // backspaces that removed one

    TypingOracle(const std::vector<RawEvent>& events, Millis gap_ms) {
        std::string segment_app;
        std::vector<std::string> buffer;
        std::optional<std::pair<std::string, std::string>> run_key;
        Millis last_key_ts = 0;
        auto close_run = [&] {
            if (!run_key) return;
            std::string joined;
            for (const auto& cp : buffer) joined += cp;
            runs[*run_key].push_back(joined);
            run_key.reset();
            buffer.clear();
        };
        for (const auto& e : events) {
            const std::string app(e.app_id());
            if (app != segment_app) {
                close_run();
                segment_app = app;
            }
            if (e.is<ev::WindowState>()) continue;
            const auto* tc = std::get_if<ev::TextChange>(&e.payload);
            if (!tc) {
                close_run();
                continue;
            }
            const auto key = std::make_pair(tc->app_id, tc->field_id);
            if (!run_key || *run_key != key || e.ts - last_key_ts > gap_ms) {
                close_run();
                run_key = key;
            }
            last_key_ts = e.ts;
            if (tc->delta == "\b") {
                if (!buffer.empty()) {
                    buffer.pop_back();
                    ++effective_erases[key];
                }
            } else {
                for (auto& cp : code_points(tc->delta)) {
                    buffer.push_back(cp);
                    ++typed_chars[key];
                }
            }
        }
        close_run();
    }
};

}  // namespace auric::test
