#include "tripleview/tripleview.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "tripleview/config.hpp"
#include "tripleview/cvvp.hpp"
#include "tripleview/decision.hpp"
#include "tripleview/error.hpp"
#include "tripleview/geometry.hpp"
#include "tripleview/image.hpp"
#include "tripleview/simulate.hpp"
#include "tripleview/stabilize.hpp"
#include "tripleview/traces.hpp"

namespace tv = tripleview;

struct tv_config {
    tv::RunConfig cfg;
};
struct tv_labels {
    tv::LabelTraceSet data;
};
struct tv_trajectory {
    tv::Trajectory data;
};
struct tv_cvvp {
    tv::CvvpPredictions data;
};
struct tv_schedule {
    tv::ModeSchedule data;
};
struct tv_events {
    std::vector<tv::ViewerEvent> data;
};
struct tv_mode_traces {
    std::vector<tv::ViewerTrace> data;
};
struct tv_evaluation {
    tv::RunConfig cfg;
    std::vector<tv::VideoInput> inputs;
    std::optional<tv::EvaluationReport> report;
};
struct tv_image {
    tv::Image data;
};

namespace {

thread_local std::string g_last_error;

tv_status set_error(tv_status status, const char* message) {
    g_last_error = message;
    return status;
}

tv_status to_status(tv::ErrorCode code) {
    switch (code) {
        case tv::ErrorCode::InvalidArgument: return TV_ERR_INVALID_ARGUMENT;
        case tv::ErrorCode::Io: return TV_ERR_IO;
        case tv::ErrorCode::Parse: return TV_ERR_PARSE;
        case tv::ErrorCode::Validation: return TV_ERR_VALIDATION;
        case tv::ErrorCode::BudgetExceeded: return TV_ERR_BUDGET_EXCEEDED;
    }
    return TV_ERR_INTERNAL;
}

// Runs `fn`, translating any exception into a status + thread-local message.
template <typename Fn>
tv_status guard(Fn&& fn) noexcept {
    try {
        fn();
        return TV_OK;
    } catch (const tv::Error& e) {
        return set_error(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(TV_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(TV_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(TV_ERR_INTERNAL, "unknown error");
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) tv::fail(tv::ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

tv::LoadOptions load_options(const tv_config* config) {
    tv::LoadOptions options;
    if (config != nullptr) {
        options.fill_gaps = config->cfg.fill_gaps;
        options.default_fps = config->cfg.fps;
    }
    return options;
}

const tv::RunConfig& config_or_default(const tv_config* config) {
    static const tv::RunConfig defaults;
    return config != nullptr ? config->cfg : defaults;
}

tv::Strategy to_strategy(tv_strategy s) {
    switch (s) {
        case TV_STRATEGY_AUTO_ENFORCED_ONLY: return tv::Strategy::AutoEnforcedOnly;
        case TV_STRATEGY_WEAK_MAN_ONLY: return tv::Strategy::WeakManOnly;
        case TV_STRATEGY_TRIPLE_VIEW: return tv::Strategy::TripleView;
    }
    tv::fail(tv::ErrorCode::InvalidArgument, "unknown strategy " + std::to_string(static_cast<int>(s)));
}

const tv::EvaluationReport& report_of(const tv_evaluation* e) {
    require(e, "evaluation");
    if (!e->report) tv::fail(tv::ErrorCode::InvalidArgument, "evaluation has not been run");
    return *e->report;
}

}  // namespace

extern "C" {

const char* tv_version(void) { return "0.1.0"; }

const char* tv_status_name(tv_status status) {
    switch (status) {
        case TV_OK: return "ok";
        case TV_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case TV_ERR_IO: return "io";
        case TV_ERR_PARSE: return "parse";
        case TV_ERR_VALIDATION: return "validation";
        case TV_ERR_BUDGET_EXCEEDED: return "budget_exceeded";
        case TV_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* tv_last_error(void) { return g_last_error.c_str(); }

void tv_string_free(char* s) { std::free(s); }

// --- config

tv_status tv_config_create(tv_config** out) {
    return guard([&] {
        require(out, "out");
        *out = new tv_config{};
    });
}

void tv_config_free(tv_config* config) { delete config; }

tv_status tv_config_set(tv_config* config, const char* key, const char* value) {
    return guard([&] {
        require(config, "config");
        require(key, "key");
        require(value, "value");
        config->cfg.set(key, value);
    });
}

tv_status tv_config_get(const tv_config* config, const char* key, char** out) {
    return guard([&] {
        require(config, "config");
        require(key, "key");
        require(out, "out");
        *out = dup_string(config->cfg.get(key));
    });
}

tv_status tv_config_load(tv_config* config, const char* path) {
    return guard([&] {
        require(config, "config");
        require(path, "path");
        config->cfg.load(path);
    });
}

tv_status tv_config_validate(const tv_config* config) {
    return guard([&] {
        require(config, "config");
        config->cfg.validate();
    });
}

tv_status tv_config_serialize(const tv_config* config, char** out) {
    return guard([&] {
        require(config, "config");
        require(out, "out");
        *out = dup_string(config->cfg.serialize());
    });
}

// --- geometry

tv_status tv_great_circle_distance(double yaw_a, double pitch_a, double yaw_b, double pitch_b, double* out_deg) {
    return guard([&] {
        require(out_deg, "out_deg");
        *out_deg = tv::great_circle_distance(tv::ViewingDirection(yaw_a, pitch_a), tv::ViewingDirection(yaw_b, pitch_b));
    });
}

// --- labels / trajectories

tv_status tv_labels_load(const char* path, const tv_config* config, tv_labels** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new tv_labels{tv::load_labels(path, load_options(config))};
    });
}

void tv_labels_free(tv_labels* labels) { delete labels; }

const char* tv_labels_video(const tv_labels* labels) { return labels ? labels->data.video_id.c_str() : ""; }

size_t tv_labels_frame_count(const tv_labels* labels) { return labels ? labels->data.frames.size() : 0; }

size_t tv_labels_viewer_count(const tv_labels* labels) { return labels ? labels->data.viewer_ids.size() : 0; }

int tv_labels_fps(const tv_labels* labels) { return labels ? labels->data.fps : 0; }

tv_status tv_labels_get(const tv_labels* labels, size_t frame, size_t viewer_index, double* yaw, double* pitch) {
    return guard([&] {
        require(labels, "labels");
        if (frame >= labels->data.frames.size() || viewer_index >= labels->data.viewer_ids.size())
            tv::fail(tv::ErrorCode::InvalidArgument, "label index out of range");
        const auto& d = labels->data.frames[frame][viewer_index];
        if (yaw) *yaw = d.yaw();
        if (pitch) *pitch = d.pitch();
    });
}

tv_status tv_trajectory_load(const char* path, const tv_config* config, tv_trajectory** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new tv_trajectory{tv::load_trajectory(path, load_options(config))};
    });
}

void tv_trajectory_free(tv_trajectory* trajectory) { delete trajectory; }

const char* tv_trajectory_video(const tv_trajectory* t) { return t ? t->data.video_id.c_str() : ""; }

size_t tv_trajectory_length(const tv_trajectory* t) { return t ? t->data.directions.size() : 0; }

// --- cvvp

tv_status tv_cvvp_ground_truth(const tv_labels* labels, const tv_config* config, tv_cvvp** out) {
    return guard([&] {
        require(labels, "labels");
        require(out, "out");
        const auto& cfg = config_or_default(config);
        cfg.validate();
        tv::CvvpPredictions series;
        series.video_id = labels->data.video_id;
        series.fps = labels->data.fps;
        series.values =
            tv::cvvp_values(tv::video_cvvp_series(labels->data, cfg.importance(), cfg.grid_res, cfg.threads));
        *out = new tv_cvvp{std::move(series)};
    });
}

tv_status tv_cvvp_load(const char* path, const tv_config* config, tv_cvvp** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new tv_cvvp{tv::load_predictions(path, load_options(config))};
    });
}

tv_status tv_cvvp_save(const tv_cvvp* series, const char* path) {
    return guard([&] {
        require(series, "series");
        require(path, "path");
        tv::save_predictions(series->data, path);
    });
}

void tv_cvvp_free(tv_cvvp* series) { delete series; }

const char* tv_cvvp_video(const tv_cvvp* s) { return s ? s->data.video_id.c_str() : ""; }

size_t tv_cvvp_length(const tv_cvvp* s) { return s ? s->data.values.size() : 0; }

int tv_cvvp_fps(const tv_cvvp* s) { return s ? s->data.fps : 0; }

tv_status tv_cvvp_values(const tv_cvvp* series, double* out, size_t capacity) {
    return guard([&] {
        require(series, "series");
        if (capacity > 0) require(out, "out");
        const size_t n = std::min(capacity, series->data.values.size());
        std::copy_n(series->data.values.begin(), n, out);
    });
}

tv_status tv_frame_cvvp(const double* yaw, const double* pitch, size_t n, const tv_config* config, double* out_cvvp,
                        double* out_yaw, double* out_pitch) {
    return guard([&] {
        require(yaw, "yaw");
        require(pitch, "pitch");
        require(out_cvvp, "out_cvvp");
        const auto& cfg = config_or_default(config);
        std::vector<tv::ViewingDirection> labels;
        labels.reserve(n);
        for (size_t i = 0; i < n; ++i) labels.emplace_back(yaw[i], pitch[i]);
        const tv::FrameCvvp r = tv::frame_cvvp(labels, cfg.importance(), cfg.grid_res);
        *out_cvvp = r.cvvp;
        if (out_yaw) *out_yaw = r.argmax.yaw();
        if (out_pitch) *out_pitch = r.argmax.pitch();
    });
}

// --- stabilization

tv_status tv_candidate_count(int seconds, int t_min, uint64_t* out) {
    return guard([&] {
        require(out, "out");
        *out = tv::candidate_count(seconds, t_min);
    });
}

tv_status tv_stabilize(const tv_cvvp* series, const tv_config* config, int brute_force, tv_schedule** out,
                       uint64_t* out_candidates) {
    return guard([&] {
        require(series, "series");
        require(out, "out");
        const auto& cfg = config_or_default(config);
        cfg.validate();
        const auto params = cfg.stabilize();
        const auto per_second = tv::per_second_average(series->data.values, series->data.fps);
        const auto normalized = tv::normalize(per_second, params.th_cvvp);
        auto result = tv::stabilize_video(normalized, params,
                                          brute_force ? tv::Solver::BruteForce : tv::Solver::DynamicProgram,
                                          cfg.candidate_budget);
        result.schedule.video_id = series->data.video_id;
        if (out_candidates) *out_candidates = result.candidates;
        *out = new tv_schedule{std::move(result.schedule)};
    });
}

tv_status tv_schedule_load(const char* path, tv_schedule** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new tv_schedule{tv::load_schedule(path)};
    });
}

tv_status tv_schedule_save(const tv_schedule* schedule, const char* path) {
    return guard([&] {
        require(schedule, "schedule");
        require(path, "path");
        tv::save_schedule(schedule->data, path);
    });
}

void tv_schedule_free(tv_schedule* schedule) { delete schedule; }

size_t tv_schedule_length(const tv_schedule* s) { return s ? s->data.values.size() : 0; }

tv_status tv_schedule_values(const tv_schedule* schedule, uint8_t* out, size_t capacity) {
    return guard([&] {
        require(schedule, "schedule");
        if (capacity > 0) require(out, "out");
        const size_t n = std::min(capacity, schedule->data.values.size());
        std::copy_n(schedule->data.values.begin(), n, out);
    });
}

int tv_schedule_is_feasible(const tv_schedule* schedule) {
    return schedule && tv::satisfies_min_duration(schedule->data) ? 1 : 0;
}

// --- decision

tv_status tv_events_load(const char* path, tv_events** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new tv_events{tv::load_events(path)};
    });
}

void tv_events_free(tv_events* events) { delete events; }

size_t tv_events_count(const tv_events* events) { return events ? events->data.size() : 0; }

tv_status tv_run_session(const tv_schedule* schedule, const tv_events* events, const tv_config* config,
                         const int* viewers, size_t viewer_count, tv_mode_traces** out) {
    return guard([&] {
        require(schedule, "schedule");
        require(out, "out");
        if (viewer_count > 0) require(viewers, "viewers");
        const auto& cfg = config_or_default(config);
        cfg.validate();
        static const std::vector<tv::ViewerEvent> none;
        const auto& ev = events ? events->data : none;
        std::span<const int> ids(viewers, viewer_count);
        *out = new tv_mode_traces{tv::run_session(schedule->data, ev, cfg.decision(), ids)};
    });
}

tv_status tv_mode_traces_save(const tv_mode_traces* traces, const char* path) {
    return guard([&] {
        require(traces, "traces");
        require(path, "path");
        tv::save_mode_traces(traces->data, path);
    });
}

void tv_mode_traces_free(tv_mode_traces* traces) { delete traces; }

size_t tv_mode_traces_viewer_count(const tv_mode_traces* t) { return t ? t->data.size() : 0; }

size_t tv_mode_traces_seconds(const tv_mode_traces* t) {
    return t && !t->data.empty() ? t->data.front().samples.size() : 0;
}

tv_status tv_mode_traces_get(const tv_mode_traces* traces, size_t viewer_index, size_t second, int* viewer_id,
                             tv_view_mode* mode, int* suppressed) {
    return guard([&] {
        require(traces, "traces");
        if (viewer_index >= traces->data.size() || second >= traces->data[viewer_index].samples.size())
            tv::fail(tv::ErrorCode::InvalidArgument, "mode trace index out of range");
        const auto& trace = traces->data[viewer_index];
        const auto& s = trace.samples[second];
        if (viewer_id) *viewer_id = trace.viewer;
        if (mode) *mode = static_cast<tv_view_mode>(static_cast<int>(s.mode));
        if (suppressed) *suppressed = s.suppressed;
    });
}

// --- evaluation

tv_status tv_evaluation_create(const tv_config* config, tv_evaluation** out) {
    return guard([&] {
        require(out, "out");
        const auto& cfg = config_or_default(config);
        cfg.validate();
        *out = new tv_evaluation{cfg, {}, std::nullopt};
    });
}

void tv_evaluation_free(tv_evaluation* evaluation) { delete evaluation; }

tv_status tv_evaluation_add_video(tv_evaluation* evaluation, const tv_labels* labels, const tv_trajectory* saliency,
                                  const tv_cvvp* predictions, const tv_events* events) {
    return guard([&] {
        require(evaluation, "evaluation");
        require(labels, "labels");
        require(saliency, "saliency");
        tv::VideoInput input;
        input.labels = labels->data;
        input.saliency = saliency->data;
        if (predictions) input.predictions = predictions->data;
        if (events) input.events = events->data;
        evaluation->inputs.push_back(std::move(input));
        evaluation->report.reset();
    });
}

tv_status tv_evaluation_run(tv_evaluation* evaluation) {
    return guard([&] {
        require(evaluation, "evaluation");
        evaluation->report = tv::evaluate(evaluation->inputs, evaluation->cfg.evaluation());
    });
}

tv_status tv_evaluation_write(const tv_evaluation* evaluation, const char* out_dir) {
    return guard([&] {
        require(out_dir, "out_dir");
        tv::write_report(report_of(evaluation), out_dir);
    });
}

size_t tv_evaluation_video_count(const tv_evaluation* e) {
    return e && e->report ? e->report->videos.size() : 0;
}

size_t tv_evaluation_excluded_count(const tv_evaluation* e) {
    return e && e->report ? e->report->excluded_videos.size() : 0;
}

tv_status tv_evaluation_mean_error(const tv_evaluation* evaluation, double* out) {
    return guard([&] {
        require(out, "out");
        *out = report_of(evaluation).mean_error;
    });
}

tv_status tv_evaluation_mean_accuracy(const tv_evaluation* evaluation, double* out) {
    return guard([&] {
        require(out, "out");
        *out = report_of(evaluation).mean_accuracy;
    });
}

tv_status tv_evaluation_importance(const tv_evaluation* evaluation, tv_strategy strategy, double* out) {
    return guard([&] {
        require(out, "out");
        const auto s = to_strategy(strategy);
        *out = report_of(evaluation).mean_importance[static_cast<int>(s)];
    });
}

tv_status tv_evaluation_video_importance(const tv_evaluation* evaluation, size_t video, tv_strategy strategy,
                                         double* out) {
    return guard([&] {
        require(out, "out");
        const auto& report = report_of(evaluation);
        if (video >= report.videos.size()) tv::fail(tv::ErrorCode::InvalidArgument, "video index out of range");
        const auto s = to_strategy(strategy);
        *out = report.videos[video].strategies[static_cast<int>(s)].mean_importance;
    });
}

tv_status tv_report_render(const char* summary_path, char** out) {
    return guard([&] {
        require(summary_path, "summary_path");
        require(out, "out");
        *out = dup_string(tv::render_summary(summary_path));
    });
}

// --- images

tv_status tv_image_load_ppm(const char* path, tv_image** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new tv_image{tv::read_ppm(path)};
    });
}

tv_status tv_image_save_ppm(const tv_image* image, const char* path) {
    return guard([&] {
        require(image, "image");
        require(path, "path");
        tv::write_ppm(image->data, path);
    });
}

void tv_image_free(tv_image* image) { delete image; }

tv_status tv_image_size(const tv_image* image, int* width, int* height, int* channels) {
    return guard([&] {
        require(image, "image");
        if (width) *width = image->data.width();
        if (height) *height = image->data.height();
        if (channels) *channels = image->data.channels();
    });
}

tv_status tv_equirect_to_cubemap(const tv_image* equirect, int face_size, tv_image* faces[6]) {
    return guard([&] {
        require(equirect, "equirect");
        require(faces, "faces");
        tv::EquirectFrame frame{equirect->data, 0};
        auto cube = tv::equirect_to_cubemap(frame, face_size);
        std::vector<tv_image*> made;
        try {
            for (auto& f : cube.faces) made.push_back(new tv_image{std::move(f)});
        } catch (...) {
            for (auto* m : made) delete m;
            throw;
        }
        for (int i = 0; i < 6; ++i) faces[i] = made[i];
    });
}

tv_status tv_extract_viewport(const tv_image* equirect, double yaw, double pitch, double fov_deg, int width,
                              int height, tv_image** out) {
    return guard([&] {
        require(equirect, "equirect");
        require(out, "out");
        tv::EquirectFrame frame{equirect->data, 0};
        *out = new tv_image{tv::extract_viewport(frame, tv::ViewingDirection(yaw, pitch), fov_deg, width, height)};
    });
}

}  // extern "C"
