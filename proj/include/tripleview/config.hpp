#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tripleview/simulate.hpp"

namespace tripleview {

/// Every tunable of the pipeline. Serialized as `key = value` lines next to
/// each output; the same format is accepted as input.
struct RunConfig {
    double th_dist = 30.0;
    double th_cvvp = 0.6;
    int t_min = 20;
    int clip_len = 120;
    int fps = kDefaultFps;
    double grid_res = kDefaultGridRes;
    double idle_timeout = 10.0;
    double switch_prob = 0.05;
    std::uint64_t seed = 0;

    bool restore_on_release = false;
    ViewMode initial_mode = ViewMode::AutoOptional;
    double manual_miss_prob = 0.0;
    bool exclude_all_enforced = true;
    bool fill_gaps = false;
    unsigned threads = 1;
    std::uint64_t candidate_budget = kDefaultCandidateBudget;

    /// Sets one field from text. Unknown keys and bad values throw.
    void set(std::string_view key, std::string_view value);
    [[nodiscard]] std::string get(std::string_view key) const;
    void validate() const;

    /// One `key = value` line per field, in a fixed order.
    [[nodiscard]] std::string serialize() const;

    /// Applies a key-value file on top of the current values. `#` starts a
    /// comment; blank lines are ignored.
    void load(const std::filesystem::path& path);

    [[nodiscard]] static std::vector<std::string> keys();

    [[nodiscard]] ImportanceParams importance() const;
    [[nodiscard]] StabilizeParams stabilize() const;
    [[nodiscard]] DecisionConfig decision() const;
    [[nodiscard]] EvaluationConfig evaluation() const;
};

}  // namespace tripleview
