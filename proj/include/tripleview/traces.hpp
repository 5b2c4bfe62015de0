#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tripleview/decision.hpp"
#include "tripleview/geometry.hpp"
#include "tripleview/schedule.hpp"

namespace tripleview {

inline constexpr int kDefaultFps = 30;

/// Every viewer's labeled most-important direction for every frame of one
/// video. Frames are dense from 0; each frame holds one direction per viewer
/// in the order of `viewer_ids` (ascending).
struct LabelTraceSet {
    std::string video_id;
    int fps = kDefaultFps;
    std::vector<int> viewer_ids;
    std::vector<std::vector<ViewingDirection>> frames;

    [[nodiscard]] int viewer_count() const noexcept { return static_cast<int>(viewer_ids.size()); }
    [[nodiscard]] long frame_count() const noexcept { return static_cast<long>(frames.size()); }
    [[nodiscard]] std::span<const ViewingDirection> frame(long i) const { return frames.at(i); }
};

/// One recommended direction per frame, e.g. a saliency detector's output.
struct Trajectory {
    std::string video_id;
    int fps = kDefaultFps;
    std::string source = "saliency";
    std::vector<ViewingDirection> directions;
};

/// Per-frame CVVP values in (0, 1], either predicted or ground truth.
struct CvvpPredictions {
    std::string video_id;
    int fps = kDefaultFps;
    std::vector<double> values;
};

struct LoadOptions {
    // Fill missing frames / viewers by holding the previous frame's value.
    bool fill_gaps = false;
    // Frame rate assumed when the file has no header line.
    int default_fps = kDefaultFps;
};

LabelTraceSet load_labels(const std::filesystem::path& path, const LoadOptions& options = {});
Trajectory load_trajectory(const std::filesystem::path& path, const LoadOptions& options = {});
CvvpPredictions load_predictions(const std::filesystem::path& path, const LoadOptions& options = {});
ModeSchedule load_schedule(const std::filesystem::path& path);
std::vector<ViewerEvent> load_events(const std::filesystem::path& path);
std::vector<ViewerTrace> load_mode_traces(const std::filesystem::path& path);

void save_labels(const LabelTraceSet& labels, const std::filesystem::path& path);
void save_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);
void save_predictions(const CvvpPredictions& predictions, const std::filesystem::path& path);
void save_schedule(const ModeSchedule& schedule, const std::filesystem::path& path);
void save_events(std::span<const ViewerEvent> events, const std::filesystem::path& path);
void save_mode_traces(std::span<const ViewerTrace> traces, const std::filesystem::path& path);

/// Stream variants used by the file functions; `source` names the input in
/// error messages.
LabelTraceSet parse_labels(std::istream& in, const std::string& source, const LoadOptions& options = {});
Trajectory parse_trajectory(std::istream& in, const std::string& source, const LoadOptions& options = {});
CvvpPredictions parse_predictions(std::istream& in, const std::string& source, const LoadOptions& options = {});
ModeSchedule parse_schedule(std::istream& in, const std::string& source);
std::vector<ViewerEvent> parse_events(std::istream& in, const std::string& source);

void write_labels(const LabelTraceSet& labels, std::ostream& out);
void write_trajectory(const Trajectory& trajectory, std::ostream& out);
void write_predictions(const CvvpPredictions& predictions, std::ostream& out);
void write_schedule(const ModeSchedule& schedule, std::ostream& out);
void write_events(std::span<const ViewerEvent> events, std::ostream& out);
void write_mode_traces(std::span<const ViewerTrace> traces, std::ostream& out);

}  // namespace tripleview
