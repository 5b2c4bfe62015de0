#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tripleview {

struct Segment {
    int start = 0;
    int length = 0;
    std::uint8_t value = 0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Per-second binary view-mode schedule: 1 selects Auto-enforced, 0 leaves
/// each viewer free to choose between Manual and Auto-optional.
struct ModeSchedule {
    std::string video_id;
    std::vector<std::uint8_t> values;
    int t_min = 1;
    int clip_len = 0;  // 0: the whole schedule is one clip

    [[nodiscard]] int seconds() const noexcept { return static_cast<int>(values.size()); }

    /// Maximal constant runs, in order.
    [[nodiscard]] std::vector<Segment> segments() const;

    friend bool operator==(const ModeSchedule&, const ModeSchedule&) = default;
};

std::vector<Segment> runs_of(const std::vector<std::uint8_t>& bits);

/// True when every run, cut at clip boundaries, lasts at least t_min
/// seconds. A clip shorter than t_min passes when it is constant.
bool satisfies_min_duration(const ModeSchedule& schedule);

}  // namespace tripleview
