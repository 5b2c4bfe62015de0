#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tripleview/schedule.hpp"

namespace tripleview {

struct StabilizeParams {
    double th_cvvp = 0.6;
    int t_min = 20;
    int clip_len = 120;

    void validate() const;
};

/// Mean of each block of `fps` frames; a trailing partial block averages the
/// frames it has.
std::vector<double> per_second_average(std::span<const double> frame_values, int fps);

/// Clamped piecewise-linear map sending 0 -> 0, th_cvvp -> 0.5, 1 -> 1.
double normalize_value(double x, double th_cvvp);
std::vector<double> normalize(std::span<const double> per_second, double th_cvvp);

/// Number of candidate schedules for one clip of `seconds` with runs of at
/// least `t_min`: 2 * sum_{m=1}^{floor(T/t_min)} C(T - m*t_min + m - 1, m - 1).
/// Saturates at UINT64_MAX.
std::uint64_t candidate_count(int seconds, int t_min);

/// Mean squared error between a binary schedule and a normalized series.
double schedule_mse(std::span<const std::uint8_t> bits, std::span<const double> normalized);

struct StabilizeResult {
    ModeSchedule schedule;
    double mse = 0.0;
    // Candidates enumerated (brute force only).
    std::uint64_t candidates = 0;
    // The clip is shorter than t_min, so only a constant schedule was possible.
    bool degenerate = false;
};

inline constexpr std::uint64_t kDefaultCandidateBudget = 20'000'000;

/// Exhaustive search over every (initial value, run lengths) candidate of a
/// single clip. Throws BudgetExceeded when the candidate count is over budget.
///
/// Ties within kMseTieTolerance go to: fewer runs, then initial value 1,
/// then the lexicographically largest run-length vector (latest boundaries).
StabilizeResult stabilize_bruteforce(std::span<const double> normalized, const StabilizeParams& params,
                                     std::uint64_t budget = kDefaultCandidateBudget);

/// Same objective and tie-break as stabilize_bruteforce, solved in O(T^2) by a
/// suffix dynamic program over (position, current value).
StabilizeResult stabilize_dp(std::span<const double> normalized, const StabilizeParams& params);

enum class Solver { DynamicProgram, BruteForce };

struct VideoStabilizeResult {
    ModeSchedule schedule;
    std::vector<StabilizeResult> clips;
    std::uint64_t candidates = 0;
};

/// Splits into clip_len windows, solves each independently and concatenates.
VideoStabilizeResult stabilize_video(std::span<const double> normalized, const StabilizeParams& params,
                                     Solver solver = Solver::DynamicProgram,
                                     std::uint64_t budget = kDefaultCandidateBudget);

/// Full chain from per-frame CVVP to schedule: per-second average, normalize,
/// stabilize_video with the DP solver.
ModeSchedule schedule_from_frames(std::span<const double> frame_cvvp, int fps, const StabilizeParams& params);

inline constexpr double kMseTieTolerance = 1e-12;

}  // namespace tripleview
