#pragma once

#include <span>
#include <vector>

#include "tripleview/geometry.hpp"

namespace tripleview {

struct LabelTraceSet;

struct ImportanceParams {
    double th_dist = 30.0;

    void validate() const;
};

/// Distances within this many degrees of th_dist count as "not closer", so
/// the strict inequality is not decided by rounding noise.
inline constexpr double kBoundaryToleranceDeg = 1e-9;

/// 1 when the view is strictly closer than th_dist to the label, else 0.
int importance_for_viewer(const ViewingDirection& view, const ViewingDirection& label,
                          const ImportanceParams& params) noexcept;

/// Number of labels the view is strictly closer than th_dist to.
int importance_count(const ViewingDirection& view, std::span<const ViewingDirection> labels,
                     const ImportanceParams& params) noexcept;

/// Fraction of labels within th_dist of the view, k / N.
double overall_importance(const ViewingDirection& view, std::span<const ViewingDirection> labels,
                          const ImportanceParams& params);

struct FrameCvvp {
    long frame_id = 0;
    double cvvp = 0.0;
    int count = 0;  // cvvp == count / N
    ViewingDirection argmax;
};

inline constexpr double kDefaultGridRes = 1.0;

/// Maximum overall importance over the sphere.
///
/// Candidates: every label, the midpoint of every label pair, the
/// circumcenter of every label triple, the cap-boundary intersection points
/// of every pair closer than 2 * th_dist, and a regular yaw/pitch grid at
/// `grid_res`. The smallest cap enclosing a set of labels is centered on a
/// label, a pair midpoint or a triple circumcenter, so the result is exact
/// without the grid; the grid is a cross-check.
FrameCvvp frame_cvvp(std::span<const ViewingDirection> labels, const ImportanceParams& params,
                     double grid_res = kDefaultGridRes);

/// Grid-only maximum. Used for profiling and as an independent lower bound.
FrameCvvp frame_cvvp_grid(std::span<const ViewingDirection> labels, const ImportanceParams& params, double grid_res);

/// frame_cvvp for every frame of a trace set, computed on up to `threads`
/// worker threads (0 picks hardware concurrency). Output order is by frame.
std::vector<FrameCvvp> video_cvvp_series(const LabelTraceSet& labels, const ImportanceParams& params,
                                         double grid_res = kDefaultGridRes, unsigned threads = 1);

std::vector<double> cvvp_values(const std::vector<FrameCvvp>& series);

}  // namespace tripleview
