// SPDX-License-Identifier: Apache-2.0
#include "auric/semantic_filter.hpp"

#include "auric/error.hpp"

#include <algorithm>
#include <utility>

namespace auric {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_continuation(unsigned char c) noexcept { return (c & 0xC0U) == 0x80U; }

}  // namespace

std::string describe(const ActionRecord& action) {
    return std::visit(overloaded{
                          [](const act::Opened& a) { return "Opened " + a.app_id; },
                          [](const act::Tapped& a) { return "Tapped \"" + a.widget_label + "\""; },
                          [](const act::Typed& a) { return "Typed \"" + a.text + "\" in " + a.field_id; },
                          [](const act::Scrolled& a) {
                              return "Scrolled " + std::string(to_string(a.direction)) + " ×" +
                                     std::to_string(a.count);
                          },
                      },
                      action.kind);
}

void apply_delta(std::string& text, std::string_view delta) {
    if (delta != kBackspace) {
        text += delta;
        return;
    }
    if (text.empty()) return;
    while (text.size() > 1 && is_continuation(static_cast<unsigned char>(text.back()))) {
        text.pop_back();
    }
    text.pop_back();
}

std::size_t code_point_count(std::string_view text) noexcept {
    std::size_t n = 0;
    for (char c : text) {
        if (!is_continuation(static_cast<unsigned char>(c))) ++n;
    }
    return n;
}

Coalescer::Coalescer(Millis gap_ms) : gap_ms_(gap_ms) {}

void Coalescer::add_action(ActionRecord action) {
    action.description = describe(action);
    current_->ts_end = std::max(current_->ts_end, action.ts_end);
    current_->actions.push_back(std::move(action));
}

void Coalescer::flush_pending() {
    if (!pending_) return;
    add_action(std::move(*pending_));
    pending_.reset();
}

void Coalescer::close_segment() {
    flush_pending();
    if (current_) {
        completed_.push_back(std::move(*current_));
        current_.reset();
    }
}

void Coalescer::open_segment(const std::string& app_id, Millis ts, bool from_window_state) {
    close_segment();
    current_ = AppSegment{app_id, ts, ts, {}};
    ActionRecord opened{ts, ts, act::Opened{app_id}, {}, from_window_state ? 1U : 0U};
    add_action(std::move(opened));
}

void Coalescer::push(const RawEvent& event) {
    if (!event.is_app_scoped()) {
        throw Error(ErrorCode::NotAppScoped,
                    std::string(event.kind_name()) + " event cannot be coalesced");
    }
    const std::string app(event.app_id());

    if (const auto* ws = std::get_if<ev::WindowState>(&event.payload)) {
        if (current_ && current_->app_id == ws->app_id) {
            // absorbed: credit the segment's OPENED and extend the segment span
            current_->actions.front().source_events += 1;
            current_->ts_end = std::max(current_->ts_end, event.ts);
        } else {
            open_segment(app, event.ts, true);
        }
        return;
    }

    if (!current_ || current_->app_id != app) open_segment(app, event.ts, false);
    current_->ts_end = std::max(current_->ts_end, event.ts);

    std::visit(overloaded{
                   [&](const ev::TextChange& e) {
                       if (pending_) {
                           auto* typed = std::get_if<act::Typed>(&pending_->kind);
                           if (typed && typed->field_id == e.field_id &&
                               event.ts - pending_last_ts_ <= gap_ms_) {
                               apply_delta(typed->text, e.delta);
                               pending_->ts_end = event.ts;
                               pending_->source_events += 1;
                               pending_last_ts_ = event.ts;
                               return;
                           }
                           flush_pending();
                       }
                       act::Typed typed{e.field_id, {}};
                       apply_delta(typed.text, e.delta);
                       pending_ = ActionRecord{event.ts, event.ts, std::move(typed), {}, 1};
                       pending_last_ts_ = event.ts;
                   },
                   [&](const ev::Scroll& e) {
                       if (pending_) {
                           auto* scrolled = std::get_if<act::Scrolled>(&pending_->kind);
                           if (scrolled && scrolled->direction == e.direction) {
                               scrolled->count += 1;
                               pending_->ts_end = event.ts;
                               pending_->source_events += 1;
                               pending_last_ts_ = event.ts;
                               return;
                           }
                           flush_pending();
                       }
                       pending_ = ActionRecord{event.ts, event.ts, act::Scrolled{e.direction, 1}, {}, 1};
                       pending_last_ts_ = event.ts;
                   },
                   [&](const ev::ViewClick& e) {
                       flush_pending();
                       add_action(ActionRecord{event.ts, event.ts, act::Tapped{e.widget_label}, {}, 1});
                   },
                   [](const auto&) {},
               },
               event.payload);
}

std::vector<AppSegment> Coalescer::take_completed() { return std::exchange(completed_, {}); }

std::vector<AppSegment> Coalescer::finish() {
    close_segment();
    return take_completed();
}

std::vector<AppSegment> coalesce(std::span<const RawEvent> events, Millis gap_ms) {
    Coalescer coalescer(gap_ms);
    for (const auto& e : events) coalescer.push(e);
    return coalescer.finish();
}

}  // namespace auric
