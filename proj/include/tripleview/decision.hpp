#pragma once

#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "tripleview/schedule.hpp"

namespace tripleview {

enum class ViewMode { Manual, AutoOptional, AutoEnforced };

std::string_view to_string(ViewMode mode) noexcept;
ViewMode parse_view_mode(std::string_view text);

/// The two regimes a schedule bit selects between.
enum class Regime { AutoEnforced, WeakManChoice };

Regime mode_from_cvvp(int cvvp_bit);

enum class EventKind { RequestManual, RequestAutoOptional, SteeringInput };

std::string_view to_string(EventKind kind) noexcept;
EventKind parse_event_kind(std::string_view text);

struct ViewerEvent {
    int viewer = 0;
    int second = 0;
    EventKind kind = EventKind::SteeringInput;

    friend bool operator==(const ViewerEvent&, const ViewerEvent&) = default;
};

struct DecisionConfig {
    // Seconds of inactivity in Manual before Auto-optional resumes.
    double idle_timeout = 10.0;
    // On leaving Auto-enforced, go back to the mode held before it instead of
    // Auto-optional.
    bool restore_on_release = false;
    ViewMode initial_mode = ViewMode::AutoOptional;

    void validate() const;
};

inline constexpr double kNoIdleTimeout = std::numeric_limits<double>::infinity();

struct ViewerSessionState {
    int viewer_id = 0;
    ViewMode current_mode = ViewMode::AutoOptional;
    int last_activity_second = 0;
    // Last second processed; -1 before the first step.
    int second = -1;
    // Mode in force when the current Auto-enforced stretch began.
    ViewMode held_mode = ViewMode::AutoOptional;
};

ViewerSessionState initial_state(int viewer_id, const DecisionConfig& config);

/// Advances one viewer by one second. `events` must all belong to this viewer
/// and this second; `second` must be after the state's last second.
ViewerSessionState step(const ViewerSessionState& state, int second, int schedule_bit,
                        std::span<const ViewerEvent> events, const DecisionConfig& config);

struct ModeSample {
    int second = 0;
    ViewMode mode = ViewMode::AutoOptional;
    // Requests received while Auto-enforced held; they had no effect.
    int suppressed = 0;

    friend bool operator==(const ModeSample&, const ModeSample&) = default;
};

struct ViewerTrace {
    int viewer = 0;
    std::vector<ModeSample> samples;

    friend bool operator==(const ViewerTrace&, const ViewerTrace&) = default;
};

/// Deterministic replay of every viewer's state machine over the schedule.
/// Viewers are those in `events` plus `viewers`, in ascending id order.
/// Events are stably sorted by second; an event past the schedule end
/// throws InvalidArgument.
std::vector<ViewerTrace> run_session(const ModeSchedule& schedule, std::span<const ViewerEvent> events,
                                     const DecisionConfig& config, std::span<const int> viewers = {});

}  // namespace tripleview
