#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tripleview/cvvp.hpp"
#include "tripleview/decision.hpp"
#include "tripleview/stabilize.hpp"
#include "tripleview/traces.hpp"

namespace tripleview {

enum class Strategy { AutoEnforcedOnly = 0, WeakManOnly, TripleView };

inline constexpr std::array<Strategy, 3> kStrategies = {Strategy::AutoEnforcedOnly, Strategy::WeakManOnly,
                                                        Strategy::TripleView};

std::string_view to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view text);

/// How simulated viewers behave while the Weak/Man regime is active.
struct BehaviorModel {
    // Per viewer, per second chance of requesting the other of
    // Manual / Auto-optional.
    double switch_prob = 0.05;
    // Per viewer, per second chance that a Manual viewer watches a direction
    // more than th_dist from their own label.
    double manual_miss_prob = 0.0;
    // Extra degrees beyond th_dist for such a miss.
    double miss_margin_deg = 10.0;

    void validate() const;
};

struct SimulationConfig {
    ImportanceParams importance;
    DecisionConfig decision;
    BehaviorModel behavior;
    std::uint64_t seed = 0;
};

struct StrategyResult {
    Strategy strategy = Strategy::AutoEnforcedOnly;
    std::vector<double> frame_importance;
    double mean_importance = 0.0;
};

/// Overall content-importance per frame when mode_use is set by `strategy`.
///
/// A viewer in Auto-enforced or Auto-optional watches the trajectory
/// direction; a viewer in Manual watches their own label. Each viewer scores
/// per-viewer importance against their own label and the frame score is the mean
/// over viewers. TripleView requires `schedule`. When `events` is given it
/// replaces the random behavior model for the Weak/Man regime.
StrategyResult simulate_strategy(const LabelTraceSet& labels, const Trajectory& saliency, Strategy strategy,
                                 const ModeSchedule* schedule, const std::vector<ViewerEvent>* events,
                                 const SimulationConfig& config);

struct CvvpError {
    std::vector<double> errors;
    double mean = 0.0;
    // (error, fraction of frames with error <= it) at 0.00, 0.01, ..., 1.00.
    std::vector<std::pair<double, double>> cdf;
};

CvvpError cvvp_error(std::span<const double> predicted, std::span<const double> truth);
std::vector<std::pair<double, double>> error_cdf(std::span<const double> errors);

/// (TP + TN) / total over seconds.
double inference_accuracy(const ModeSchedule& predicted, const ModeSchedule& truth);

struct EvaluationConfig {
    SimulationConfig simulation;
    StabilizeParams stabilize;
    double grid_res = kDefaultGridRes;
    bool exclude_all_enforced = true;
    unsigned threads = 1;
};

struct VideoInput {
    LabelTraceSet labels;
    Trajectory saliency;
    std::optional<CvvpPredictions> predictions;
    std::optional<std::vector<ViewerEvent>> events;
};

struct VideoReport {
    std::string video_id;
    int fps = kDefaultFps;
    int viewer_count = 0;
    bool has_predictions = false;
    std::vector<double> truth_cvvp;
    std::vector<double> predicted_cvvp;
    std::vector<double> truth_per_second;
    std::vector<double> predicted_per_second;
    ModeSchedule truth_schedule;
    ModeSchedule predicted_schedule;
    CvvpError error;
    double accuracy = 0.0;
    std::array<StrategyResult, 3> strategies;
    bool excluded = false;
};

struct EvaluationReport {
    std::vector<VideoReport> videos;
    std::vector<std::string> excluded_videos;
    double mean_error = 0.0;
    std::vector<std::pair<double, double>> error_cdf;
    double mean_accuracy = 0.0;
    // Mean over non-excluded videos; NaN when every video is excluded.
    std::array<double, 3> mean_importance{};
};

/// Ground truth CVVP, stabilization of prediction and truth, all three
/// strategies and the exclusion rule. Without predictions, TripleView runs
/// on the ground-truth schedule. Videos are processed on up to
/// `config.threads` threads; the report is ordered as `inputs`.
EvaluationReport evaluate(std::span<const VideoInput> inputs, const EvaluationConfig& config);

/// Writes summary.json, strategies.csv, frames.csv, seconds.csv and cdf.csv.
void write_report(const EvaluationReport& report, const std::filesystem::path& out_dir);

/// Renders a summary.json file as a plain-text table.
std::string render_summary(const std::filesystem::path& summary_json);

}  // namespace tripleview
