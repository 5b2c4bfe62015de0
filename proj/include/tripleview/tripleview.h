#ifndef TRIPLEVIEW_H
#define TRIPLEVIEW_H

/*
 * C interface to the tripleview view-mode decision library.
 *
 * Every object is an opaque handle created by a *_load / *_create / compute
 * call and released with the matching *_free. Functions that can fail return
 * a tv_status; on failure tv_last_error() describes the problem for the
 * calling thread until its next failing call. Strings returned through a
 * char** must be released with tv_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(TRIPLEVIEW_BUILDING)
#define TV_API __attribute__((visibility("default")))
#else
#define TV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tv_status {
    TV_OK = 0,
    TV_ERR_INVALID_ARGUMENT = 1,
    TV_ERR_IO = 2,
    TV_ERR_PARSE = 3,
    TV_ERR_VALIDATION = 4,
    TV_ERR_BUDGET_EXCEEDED = 5,
    TV_ERR_INTERNAL = 6
} tv_status;

typedef enum tv_view_mode {
    TV_MODE_MANUAL = 0,
    TV_MODE_AUTO_OPTIONAL = 1,
    TV_MODE_AUTO_ENFORCED = 2
} tv_view_mode;

typedef enum tv_strategy {
    TV_STRATEGY_AUTO_ENFORCED_ONLY = 0,
    TV_STRATEGY_WEAK_MAN_ONLY = 1,
    TV_STRATEGY_TRIPLE_VIEW = 2
} tv_strategy;

typedef struct tv_config tv_config;
typedef struct tv_labels tv_labels;
typedef struct tv_trajectory tv_trajectory;
typedef struct tv_cvvp tv_cvvp;
typedef struct tv_schedule tv_schedule;
typedef struct tv_events tv_events;
typedef struct tv_mode_traces tv_mode_traces;
typedef struct tv_evaluation tv_evaluation;
typedef struct tv_image tv_image;

TV_API const char* tv_version(void);
TV_API const char* tv_status_name(tv_status status);
TV_API const char* tv_last_error(void);
TV_API void tv_string_free(char* s);

/* Run configuration: every pipeline tunable, addressed by key. */
TV_API tv_status tv_config_create(tv_config** out);
TV_API void tv_config_free(tv_config* config);
TV_API tv_status tv_config_set(tv_config* config, const char* key, const char* value);
TV_API tv_status tv_config_get(const tv_config* config, const char* key, char** out);
/* Applies a `key = value` file on top of the current values. */
TV_API tv_status tv_config_load(tv_config* config, const char* path);
TV_API tv_status tv_config_validate(const tv_config* config);
TV_API tv_status tv_config_serialize(const tv_config* config, char** out);

/* Geometry. Angles in degrees. */
TV_API tv_status tv_great_circle_distance(double yaw_a, double pitch_a, double yaw_b, double pitch_b,
                                          double* out_deg);

/* Viewer label traces. Uses the config's fps when the file has no header;
 * fill_gaps comes from the config. */
TV_API tv_status tv_labels_load(const char* path, const tv_config* config, tv_labels** out);
TV_API void tv_labels_free(tv_labels* labels);
TV_API const char* tv_labels_video(const tv_labels* labels);
TV_API size_t tv_labels_frame_count(const tv_labels* labels);
TV_API size_t tv_labels_viewer_count(const tv_labels* labels);
TV_API int tv_labels_fps(const tv_labels* labels);
TV_API tv_status tv_labels_get(const tv_labels* labels, size_t frame, size_t viewer_index, double* yaw,
                               double* pitch);

/* Saliency (or any recommended-direction) trajectories. */
TV_API tv_status tv_trajectory_load(const char* path, const tv_config* config, tv_trajectory** out);
TV_API void tv_trajectory_free(tv_trajectory* trajectory);
TV_API const char* tv_trajectory_video(const tv_trajectory* trajectory);
TV_API size_t tv_trajectory_length(const tv_trajectory* trajectory);

/* Per-frame CVVP series in the prediction file format. */
TV_API tv_status tv_cvvp_ground_truth(const tv_labels* labels, const tv_config* config, tv_cvvp** out);
TV_API tv_status tv_cvvp_load(const char* path, const tv_config* config, tv_cvvp** out);
TV_API tv_status tv_cvvp_save(const tv_cvvp* series, const char* path);
TV_API void tv_cvvp_free(tv_cvvp* series);
TV_API const char* tv_cvvp_video(const tv_cvvp* series);
TV_API size_t tv_cvvp_length(const tv_cvvp* series);
TV_API int tv_cvvp_fps(const tv_cvvp* series);
/* Copies min(length, capacity) values. */
TV_API tv_status tv_cvvp_values(const tv_cvvp* series, double* out, size_t capacity);

/* CVVP of one frame from n labels; also reports one maximizing direction. */
TV_API tv_status tv_frame_cvvp(const double* yaw, const double* pitch, size_t n, const tv_config* config,
                               double* out_cvvp, double* out_yaw, double* out_pitch);

/* Stabilization. */
TV_API tv_status tv_candidate_count(int seconds, int t_min, uint64_t* out);
/* Per-second averaging, normalization and per-clip stabilization. With
 * brute_force set, every clip is solved by exhaustive enumeration and the
 * number of candidates enumerated is stored in out_candidates (nullable). */
TV_API tv_status tv_stabilize(const tv_cvvp* series, const tv_config* config, int brute_force, tv_schedule** out,
                              uint64_t* out_candidates);
TV_API tv_status tv_schedule_load(const char* path, tv_schedule** out);
TV_API tv_status tv_schedule_save(const tv_schedule* schedule, const char* path);
TV_API void tv_schedule_free(tv_schedule* schedule);
TV_API size_t tv_schedule_length(const tv_schedule* schedule);
TV_API tv_status tv_schedule_values(const tv_schedule* schedule, uint8_t* out, size_t capacity);
/* 1 when every in-clip run lasts at least t_min seconds. */
TV_API int tv_schedule_is_feasible(const tv_schedule* schedule);

/* View-mode state machine. */
TV_API tv_status tv_events_load(const char* path, tv_events** out);
TV_API void tv_events_free(tv_events* events);
TV_API size_t tv_events_count(const tv_events* events);
/* events may be NULL. viewers lists extra viewer ids to trace. */
TV_API tv_status tv_run_session(const tv_schedule* schedule, const tv_events* events, const tv_config* config,
                                const int* viewers, size_t viewer_count, tv_mode_traces** out);
TV_API tv_status tv_mode_traces_save(const tv_mode_traces* traces, const char* path);
TV_API void tv_mode_traces_free(tv_mode_traces* traces);
TV_API size_t tv_mode_traces_viewer_count(const tv_mode_traces* traces);
TV_API size_t tv_mode_traces_seconds(const tv_mode_traces* traces);
TV_API tv_status tv_mode_traces_get(const tv_mode_traces* traces, size_t viewer_index, size_t second, int* viewer_id,
                                    tv_view_mode* mode, int* suppressed);

/* Trace-driven evaluation of the three mode_use strategies. */
TV_API tv_status tv_evaluation_create(const tv_config* config, tv_evaluation** out);
TV_API void tv_evaluation_free(tv_evaluation* evaluation);
/* predictions and events may be NULL. Inputs are copied. */
TV_API tv_status tv_evaluation_add_video(tv_evaluation* evaluation, const tv_labels* labels,
                                         const tv_trajectory* saliency, const tv_cvvp* predictions,
                                         const tv_events* events);
TV_API tv_status tv_evaluation_run(tv_evaluation* evaluation);
TV_API tv_status tv_evaluation_write(const tv_evaluation* evaluation, const char* out_dir);
TV_API size_t tv_evaluation_video_count(const tv_evaluation* evaluation);
TV_API size_t tv_evaluation_excluded_count(const tv_evaluation* evaluation);
TV_API tv_status tv_evaluation_mean_error(const tv_evaluation* evaluation, double* out);
TV_API tv_status tv_evaluation_mean_accuracy(const tv_evaluation* evaluation, double* out);
/* Aggregate over non-excluded videos; NaN when all are excluded. */
TV_API tv_status tv_evaluation_importance(const tv_evaluation* evaluation, tv_strategy strategy, double* out);
TV_API tv_status tv_evaluation_video_importance(const tv_evaluation* evaluation, size_t video, tv_strategy strategy,
                                                double* out);
TV_API tv_status tv_report_render(const char* summary_path, char** out);

/* Images (binary PPM) and projections. */
TV_API tv_status tv_image_load_ppm(const char* path, tv_image** out);
TV_API tv_status tv_image_save_ppm(const tv_image* image, const char* path);
TV_API void tv_image_free(tv_image* image);
TV_API tv_status tv_image_size(const tv_image* image, int* width, int* height, int* channels);
/* faces receives front, back, left, right, up, down; free each one. */
TV_API tv_status tv_equirect_to_cubemap(const tv_image* equirect, int face_size, tv_image* faces[6]);
TV_API tv_status tv_extract_viewport(const tv_image* equirect, double yaw, double pitch, double fov_deg, int width,
                                     int height, tv_image** out);

#ifdef __cplusplus
}
#endif

#endif /* TRIPLEVIEW_H */
