#include "tripleview/decision.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "tripleview/error.hpp"

namespace tripleview {

std::string_view to_string(ViewMode mode) noexcept {
    switch (mode) {
        case ViewMode::Manual: return "manual";
        case ViewMode::AutoOptional: return "auto_optional";
        case ViewMode::AutoEnforced: return "auto_enforced";
    }
    return "?";
}

ViewMode parse_view_mode(std::string_view text) {
    if (text == "manual") return ViewMode::Manual;
    if (text == "auto_optional") return ViewMode::AutoOptional;
    if (text == "auto_enforced") return ViewMode::AutoEnforced;
    fail(ErrorCode::Parse, "unknown view mode '" + std::string(text) + "'");
}

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::RequestManual: return "request_manual";
        case EventKind::RequestAutoOptional: return "request_auto_optional";
        case EventKind::SteeringInput: return "steering";
    }
    return "?";
}

EventKind parse_event_kind(std::string_view text) {
    if (text == "request_manual") return EventKind::RequestManual;
    if (text == "request_auto_optional") return EventKind::RequestAutoOptional;
    if (text == "steering") return EventKind::SteeringInput;
    fail(ErrorCode::Parse, "unknown event kind '" + std::string(text) + "'");
}

Regime mode_from_cvvp(int cvvp_bit) { return cvvp_bit != 0 ? Regime::AutoEnforced : Regime::WeakManChoice; }

void DecisionConfig::validate() const {
    if (!(idle_timeout > 0.0)) fail(ErrorCode::InvalidArgument, "idle_timeout must be positive");
    if (initial_mode == ViewMode::AutoEnforced) {
        fail(ErrorCode::InvalidArgument, "initial mode must be manual or auto_optional");
    }
}

ViewerSessionState initial_state(int viewer_id, const DecisionConfig& config) {
    ViewerSessionState s;
    s.viewer_id = viewer_id;
    s.current_mode = config.initial_mode;
    s.held_mode = config.initial_mode;
    s.last_activity_second = 0;
    s.second = -1;
    return s;
}

ViewerSessionState step(const ViewerSessionState& state, int second, int schedule_bit,
                        std::span<const ViewerEvent> events, const DecisionConfig& config) {
    if (second <= state.second) {
        std::ostringstream msg;
        msg << "viewer " << state.viewer_id << ": second " << second << " is not after " << state.second;
        fail(ErrorCode::InvalidArgument, msg.str());
    }
    for (const auto& e : events) {
        if (e.viewer != state.viewer_id || e.second != second) {
            std::ostringstream msg;
            msg << "viewer " << state.viewer_id << ": event for viewer " << e.viewer << " at second " << e.second
                << " delivered at second " << second;
            fail(ErrorCode::InvalidArgument, msg.str());
        }
    }

    ViewerSessionState next = state;
    next.second = second;

    if (mode_from_cvvp(schedule_bit) == Regime::AutoEnforced) {
        if (state.current_mode != ViewMode::AutoEnforced) next.held_mode = state.current_mode;
        next.current_mode = ViewMode::AutoEnforced;
        return next;
    }

    if (state.current_mode == ViewMode::AutoEnforced) {
        next.current_mode = config.restore_on_release ? state.held_mode : ViewMode::AutoOptional;
        next.last_activity_second = second;
    }

    for (const auto& e : events) {
        switch (e.kind) {
            case EventKind::RequestManual:
                next.current_mode = ViewMode::Manual;
                next.last_activity_second = second;
                break;
            case EventKind::RequestAutoOptional:
                next.current_mode = ViewMode::AutoOptional;
                next.last_activity_second = second;
                break;
            case EventKind::SteeringInput:
                next.last_activity_second = second;
                break;
        }
    }

    if (next.current_mode == ViewMode::Manual &&
        static_cast<double>(second - next.last_activity_second) >= config.idle_timeout) {
        next.current_mode = ViewMode::AutoOptional;
    }
    return next;
}

std::vector<ViewerTrace> run_session(const ModeSchedule& schedule, std::span<const ViewerEvent> events,
                                     const DecisionConfig& config, std::span<const int> viewers) {
    config.validate();
    const int total = schedule.seconds();

    std::map<int, std::vector<std::vector<ViewerEvent>>> by_viewer;
    for (int v : viewers) by_viewer.try_emplace(v, std::vector<std::vector<ViewerEvent>>(total));
    for (const auto& e : events) {
        if (e.second < 0 || e.second >= total) {
            std::ostringstream msg;
            msg << "event for viewer " << e.viewer << " at second " << e.second << " is outside the schedule (0.."
                << total << ")";
            fail(ErrorCode::Validation, msg.str());
        }
        auto& slots = by_viewer.try_emplace(e.viewer, std::vector<std::vector<ViewerEvent>>(total)).first->second;
        slots[e.second].push_back(e);
    }

    std::vector<ViewerTrace> out;
    out.reserve(by_viewer.size());
    for (const auto& [viewer, slots] : by_viewer) {
        ViewerTrace trace;
        trace.viewer = viewer;
        trace.samples.reserve(total);
        ViewerSessionState state = initial_state(viewer, config);
        for (int s = 0; s < total; ++s) {
            const int bit = schedule.values[s];
            state = step(state, s, bit, slots[s], config);
            const int suppressed = bit != 0 ? static_cast<int>(slots[s].size()) : 0;
            trace.samples.push_back({s, state.current_mode, suppressed});
        }
        out.push_back(std::move(trace));
    }
    return out;
}

}  // namespace tripleview
