#include "tripleview/cvvp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "tripleview/error.hpp"
#include "tripleview/traces.hpp"

namespace tripleview {

void ImportanceParams::validate() const {
    if (!(th_dist > 0.0 && th_dist < 180.0)) {
        std::ostringstream msg;
        msg << "th_dist " << th_dist << " outside (0, 180)";
        fail(ErrorCode::InvalidArgument, msg.str());
    }
}

int importance_for_viewer(const ViewingDirection& view, const ViewingDirection& label,
                          const ImportanceParams& params) noexcept {
    return great_circle_distance(view, label) < params.th_dist - kBoundaryToleranceDeg ? 1 : 0;
}

int importance_count(const ViewingDirection& view, std::span<const ViewingDirection> labels,
                     const ImportanceParams& params) noexcept {
    int k = 0;
    for (const auto& label : labels) k += importance_for_viewer(view, label, params);
    return k;
}

double overall_importance(const ViewingDirection& view, std::span<const ViewingDirection> labels,
                          const ImportanceParams& params) {
    if (labels.empty()) fail(ErrorCode::InvalidArgument, "overall importance needs at least one label");
    return static_cast<double>(importance_count(view, labels, params)) / static_cast<double>(labels.size());
}

namespace {

class Maximizer {
public:
    Maximizer(std::span<const ViewingDirection> labels, const ImportanceParams& params)
        : labels_(labels), params_(params), n_(static_cast<int>(labels.size())) {}

    void offer(const ViewingDirection& d) {
        if (done()) return;
        const int k = importance_count(d, labels_, params_);
        if (k > best_) {
            best_ = k;
            argmax_ = d;
        }
    }

    void offer(const Vec3& v) {
        if (done() || norm(v) == 0.0) return;
        offer(unit_vector_to_direction(v));
    }

    // Regular grid: yaw in [-180, 180), pitch in [-90, 90] inclusive. A dot
    // product prefilter skips points that cannot beat the current best.
    void offer_grid(double grid_res) {
        std::vector<Vec3> label_vecs;
        label_vecs.reserve(labels_.size());
        for (const auto& l : labels_) label_vecs.push_back(direction_to_unit_vector(l));
        // Loose by 1e-6 degrees so the prefilter never rejects a real hit.
        const double cos_th = std::cos((params_.th_dist + 1e-6) * kDegToRad);
        const int yaw_steps = std::max(1, static_cast<int>(std::ceil(360.0 / grid_res - 1e-9)));
        const int pitch_steps = static_cast<int>(std::floor(180.0 / grid_res + 1e-9));
        for (int pi = 0; pi <= pitch_steps && !done(); ++pi) {
            const double pitch = std::min(90.0, -90.0 + pi * grid_res);
            for (int yi = 0; yi < yaw_steps && !done(); ++yi) {
                const double yaw = -180.0 + yi * grid_res;
                if (yaw >= 180.0) break;
                const ViewingDirection d{yaw, pitch};
                const Vec3 v = direction_to_unit_vector(d);
                int rough = 0;
                for (const auto& lv : label_vecs) rough += dot(v, lv) > cos_th ? 1 : 0;
                if (rough > best_) offer(d);
            }
            if (pitch == 90.0) break;
        }
    }

    [[nodiscard]] bool done() const noexcept { return best_ == n_; }
    [[nodiscard]] int best() const noexcept { return best_; }
    [[nodiscard]] const ViewingDirection& argmax() const noexcept { return argmax_; }

private:
    std::span<const ViewingDirection> labels_;
    ImportanceParams params_;
    int n_;
    int best_ = -1;
    ViewingDirection argmax_;
};

FrameCvvp finish(const Maximizer& m, std::size_t n) {
    FrameCvvp out;
    out.count = m.best();
    out.cvvp = static_cast<double>(m.best()) / static_cast<double>(n);
    out.argmax = m.argmax();
    return out;
}

void check_inputs(std::span<const ViewingDirection> labels, const ImportanceParams& params, double grid_res) {
    if (labels.empty()) fail(ErrorCode::InvalidArgument, "frame has no labels");
    params.validate();
    if (!(grid_res > 0.0) || !std::isfinite(grid_res)) fail(ErrorCode::InvalidArgument, "grid_res must be positive");
}

}  // namespace

FrameCvvp frame_cvvp(std::span<const ViewingDirection> labels, const ImportanceParams& params, double grid_res) {
    check_inputs(labels, params, grid_res);
    Maximizer m(labels, params);
    const std::size_t n = labels.size();
    std::vector<Vec3> vecs;
    vecs.reserve(n);
    for (const auto& l : labels) vecs.push_back(direction_to_unit_vector(l));

    for (const auto& l : labels) m.offer(l);

    // Pair midpoints.
    for (std::size_t i = 0; i < n && !m.done(); ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec3& a = vecs[i];
            const Vec3& b = vecs[j];
            m.offer(Vec3{a[0] + b[0], a[1] + b[1], a[2] + b[2]});
        }
    }

    // Triple circumcenters, on the side of the sphere the triple sits on.
    for (std::size_t i = 0; i < n && !m.done(); ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const Vec3& a = vecs[i];
                const Vec3& b = vecs[j];
                const Vec3& c = vecs[k];
                Vec3 nrm = cross(Vec3{b[0] - a[0], b[1] - a[1], b[2] - a[2]}, Vec3{c[0] - a[0], c[1] - a[1], c[2] - a[2]});
                const double len = norm(nrm);
                if (len < 1e-14) continue;
                if (dot(nrm, a) < 0.0) nrm = {-nrm[0], -nrm[1], -nrm[2]};
                m.offer(nrm);
            }
        }
    }

    // Points exactly th_dist from both labels of a pair.
    const double cos_th = std::cos(params.th_dist * kDegToRad);
    for (std::size_t i = 0; i < n && !m.done(); ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec3& a = vecs[i];
            const Vec3& b = vecs[j];
            const double half = 0.5 * great_circle_distance(labels[i], labels[j]);
            if (half >= params.th_dist || half == 0.0) continue;
            const Vec3 sum{a[0] + b[0], a[1] + b[1], a[2] + b[2]};
            const Vec3 p = cross(a, b);
            if (norm(sum) == 0.0 || norm(p) == 0.0) continue;
            const Vec3 mid = normalized(sum);
            const Vec3 perp = normalized(p);
            const double c = std::clamp(cos_th / std::cos(half * kDegToRad), -1.0, 1.0);
            const double phi = std::acos(c);
            for (double sign : {1.0, -1.0}) {
                const double s = sign * std::sin(phi);
                m.offer(Vec3{std::cos(phi) * mid[0] + s * perp[0], std::cos(phi) * mid[1] + s * perp[1],
                             std::cos(phi) * mid[2] + s * perp[2]});
            }
        }
    }

    m.offer_grid(grid_res);
    return finish(m, n);
}

FrameCvvp frame_cvvp_grid(std::span<const ViewingDirection> labels, const ImportanceParams& params, double grid_res) {
    check_inputs(labels, params, grid_res);
    Maximizer m(labels, params);
    m.offer_grid(grid_res);
    return finish(m, labels.size());
}

std::vector<FrameCvvp> video_cvvp_series(const LabelTraceSet& labels, const ImportanceParams& params, double grid_res,
                                         unsigned threads) {
    const long frames = labels.frame_count();
    std::vector<FrameCvvp> out(static_cast<std::size_t>(frames));
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<long>(threads, std::max<long>(frames, 1)));

    auto work = [&](long begin, long step) {
        for (long f = begin; f < frames; f += step) {
            try {
                out[f] = frame_cvvp(labels.frame(f), params, grid_res);
            } catch (const Error& e) {
                std::ostringstream msg;
                msg << "video '" << labels.video_id << "' frame " << f << ": " << e.what();
                throw Error(e.code(), msg.str());
            }
            out[f].frame_id = f;
        }
    };

    if (threads <= 1) {
        work(0, 1);
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                work(t, threads);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

std::vector<double> cvvp_values(const std::vector<FrameCvvp>& series) {
    std::vector<double> v;
    v.reserve(series.size());
    for (const auto& f : series) v.push_back(f.cvvp);
    return v;
}

}  // namespace tripleview
