// tripleview command-line driver. Everything goes through the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tripleview/tripleview.h"

namespace fs = std::filesystem;

namespace {

// Thrown to unwind to main with a status already reported.
struct Failure {
    tv_status status;
    std::string message;
};

void check(tv_status s, const std::string& context = {}) {
    if (s == TV_OK) return;
    std::string msg = tv_last_error();
    if (!context.empty()) msg = context + ": " + msg;
    throw Failure{s, msg};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using Config = Handle<tv_config, tv_config_free>;
using Labels = Handle<tv_labels, tv_labels_free>;
using Traj = Handle<tv_trajectory, tv_trajectory_free>;
using Cvvp = Handle<tv_cvvp, tv_cvvp_free>;
using Schedule = Handle<tv_schedule, tv_schedule_free>;
using Events = Handle<tv_events, tv_events_free>;
using Traces = Handle<tv_mode_traces, tv_mode_traces_free>;
using Evaluation = Handle<tv_evaluation, tv_evaluation_free>;
using ImageH = Handle<tv_image, tv_image_free>;

std::string take_string(char* s) {
    std::string out = s ? s : "";
    tv_string_free(s);
    return out;
}

// Config keys, taken from the library's own serialization.
std::vector<std::string> config_keys() {
    tv_config* raw = nullptr;
    check(tv_config_create(&raw));
    Config cfg(raw);
    char* text = nullptr;
    check(tv_config_serialize(cfg.get(), &text));
    std::istringstream in(take_string(text));
    std::vector<std::string> keys;
    for (std::string line; std::getline(in, line);) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) keys.push_back(line.substr(0, eq));
    }
    return keys;
}

// --config plus one --<key> flag per tunable, attached to a subcommand.
struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> values;

    void attach(CLI::App* app, const std::vector<std::string>& keys) {
        app->add_option("--config", config_path, "key = value file applied before individual flags")
            ->check(CLI::ExistingFile);
        for (const auto& key : keys) app->add_option("--" + key, values[key], "override " + key);
    }

    Config build() const {
        tv_config* raw = nullptr;
        check(tv_config_create(&raw));
        Config cfg(raw);
        if (!config_path.empty()) check(tv_config_load(cfg.get(), config_path.c_str()));
        for (const auto& [k, v] : values) {
            if (v.empty()) continue;
            check(tv_config_set(cfg.get(), k.c_str(), v.c_str()), "--" + k);
        }
        check(tv_config_validate(cfg.get()));
        return cfg;
    }
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Failure{TV_ERR_IO, "cannot write " + path.string()};
}

void write_run_config(const tv_config* cfg, const fs::path& path) {
    char* text = nullptr;
    check(tv_config_serialize(cfg, &text));
    write_text(path, take_string(text));
}

// Single-file outputs get a sibling <out>.run_config.txt.
void write_run_config_beside(const tv_config* cfg, const std::string& out) {
    write_run_config(cfg, out + ".run_config.txt");
}

Labels load_labels(const std::string& path, const tv_config* cfg) {
    tv_labels* raw = nullptr;
    check(tv_labels_load(path.c_str(), cfg, &raw));
    return Labels(raw);
}

Traj load_trajectory(const std::string& path, const tv_config* cfg) {
    tv_trajectory* raw = nullptr;
    check(tv_trajectory_load(path.c_str(), cfg, &raw));
    return Traj(raw);
}

Cvvp load_cvvp(const std::string& path, const tv_config* cfg) {
    tv_cvvp* raw = nullptr;
    check(tv_cvvp_load(path.c_str(), cfg, &raw));
    return Cvvp(raw);
}

Events load_events(const std::string& path) {
    tv_events* raw = nullptr;
    check(tv_events_load(path.c_str(), &raw));
    return Events(raw);
}

ImageH load_image(const std::string& path) {
    tv_image* raw = nullptr;
    check(tv_image_load_ppm(path.c_str(), &raw));
    return ImageH(raw);
}

int cmd_cvvp_gt(const ConfigFlags& flags, const std::string& labels_path, const std::string& out) {
    Config cfg = flags.build();
    Labels labels = load_labels(labels_path, cfg.get());
    tv_cvvp* raw = nullptr;
    check(tv_cvvp_ground_truth(labels.get(), cfg.get(), &raw));
    Cvvp series(raw);
    check(tv_cvvp_save(series.get(), out.c_str()));
    write_run_config_beside(cfg.get(), out);
    std::cerr << "wrote " << tv_cvvp_length(series.get()) << " frames of '" << tv_cvvp_video(series.get()) << "' to "
              << out << "\n";
    return 0;
}

int cmd_stabilize(const ConfigFlags& flags, const std::string& cvvp_path, const std::string& out, bool brute) {
    Config cfg = flags.build();
    Cvvp series = load_cvvp(cvvp_path, cfg.get());
    tv_schedule* raw = nullptr;
    std::uint64_t candidates = 0;
    check(tv_stabilize(series.get(), cfg.get(), brute ? 1 : 0, &raw, &candidates));
    Schedule schedule(raw);
    check(tv_schedule_save(schedule.get(), out.c_str()));
    write_run_config_beside(cfg.get(), out);
    if (brute) std::cout << "candidates: " << candidates << "\n";
    std::cerr << "wrote " << tv_schedule_length(schedule.get()) << " seconds to " << out << "\n";
    return 0;
}

int cmd_decide(const ConfigFlags& flags, const std::string& schedule_path, const std::string& events_path,
               const std::vector<int>& viewers, const std::string& out) {
    Config cfg = flags.build();
    tv_schedule* sraw = nullptr;
    check(tv_schedule_load(schedule_path.c_str(), &sraw));
    Schedule schedule(sraw);
    Events events;
    if (!events_path.empty()) events = load_events(events_path);
    tv_mode_traces* traw = nullptr;
    check(tv_run_session(schedule.get(), events.get(), cfg.get(), viewers.data(), viewers.size(), &traw));
    Traces traces(traw);
    check(tv_mode_traces_save(traces.get(), out.c_str()));
    write_run_config_beside(cfg.get(), out);
    std::cerr << "wrote " << tv_mode_traces_viewer_count(traces.get()) << " viewer traces to " << out << "\n";
    return 0;
}

struct SimulateArgs {
    std::vector<std::string> labels;
    std::vector<std::string> trajectories;
    std::vector<std::string> predictions;
    std::vector<std::string> events;  // VIDEO=PATH
    std::string out_dir;
    bool quiet = false;
};

int cmd_simulate(const ConfigFlags& flags, const SimulateArgs& args) {
    Config cfg = flags.build();

    std::vector<Labels> labels;
    for (const auto& p : args.labels) labels.push_back(load_labels(p, cfg.get()));

    std::map<std::string, Traj> trajectories;
    for (const auto& p : args.trajectories) {
        Traj t = load_trajectory(p, cfg.get());
        std::string id = tv_trajectory_video(t.get());
        if (trajectories.count(id)) throw Failure{TV_ERR_INVALID_ARGUMENT, p + ": duplicate trajectory for video '" + id + "'"};
        trajectories.emplace(id, std::move(t));
    }
    std::map<std::string, Cvvp> predictions;
    for (const auto& p : args.predictions) {
        Cvvp c = load_cvvp(p, cfg.get());
        std::string id = tv_cvvp_video(c.get());
        if (predictions.count(id)) throw Failure{TV_ERR_INVALID_ARGUMENT, p + ": duplicate predictions for video '" + id + "'"};
        predictions.emplace(id, std::move(c));
    }
    std::map<std::string, Events> events;
    for (const auto& arg : args.events) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Failure{TV_ERR_INVALID_ARGUMENT, "--events expects VIDEO=PATH, got '" + arg + "'"};
        events[arg.substr(0, eq)] = load_events(arg.substr(eq + 1));
    }

    tv_evaluation* eraw = nullptr;
    check(tv_evaluation_create(cfg.get(), &eraw));
    Evaluation eval(eraw);
    std::map<std::string, bool> used;
    for (const auto& l : labels) {
        const std::string id = tv_labels_video(l.get());
        auto t = trajectories.find(id);
        if (t == trajectories.end()) throw Failure{TV_ERR_INVALID_ARGUMENT, "no trajectory given for video '" + id + "'"};
        auto p = predictions.find(id);
        auto e = events.find(id);
        check(tv_evaluation_add_video(eval.get(), l.get(), t->second.get(),
                                      p == predictions.end() ? nullptr : p->second.get(),
                                      e == events.end() ? nullptr : e->second.get()),
              "video '" + id + "'");
        used[id] = true;
    }
    for (const auto& [id, _] : predictions)
        if (!used.count(id)) throw Failure{TV_ERR_INVALID_ARGUMENT, "predictions for unknown video '" + id + "'"};
    for (const auto& [id, _] : events)
        if (!used.count(id)) throw Failure{TV_ERR_INVALID_ARGUMENT, "events for unknown video '" + id + "'"};

    check(tv_evaluation_run(eval.get()));
    check(tv_evaluation_write(eval.get(), args.out_dir.c_str()));
    write_run_config(cfg.get(), fs::path(args.out_dir) / "run_config.txt");

    if (!args.quiet) {
        char* text = nullptr;
        check(tv_report_render((fs::path(args.out_dir) / "summary.json").c_str(), &text));
        std::cout << take_string(text);
    }
    return 0;
}

int cmd_report(const std::string& path) {
    fs::path p(path);
    if (fs::is_directory(p)) p /= "summary.json";
    char* text = nullptr;
    check(tv_report_render(p.c_str(), &text));
    std::cout << take_string(text);
    return 0;
}

int cmd_cubemap(const std::string& in, int face_size, const std::string& out_dir) {
    static const char* kNames[6] = {"front", "back", "left", "right", "up", "down"};
    ImageH src = load_image(in);
    tv_image* faces[6] = {};
    check(tv_equirect_to_cubemap(src.get(), face_size, faces));
    std::vector<ImageH> owned;
    for (auto* f : faces) owned.emplace_back(f);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Failure{TV_ERR_IO, "cannot create " + out_dir + ": " + ec.message()};
    for (int i = 0; i < 6; ++i) {
        const auto path = (fs::path(out_dir) / (std::string(kNames[i]) + ".ppm")).string();
        check(tv_image_save_ppm(owned[i].get(), path.c_str()));
    }
    return 0;
}

int cmd_viewport(const std::string& in, double yaw, double pitch, double fov, int w, int h, const std::string& out) {
    ImageH src = load_image(in);
    tv_image* raw = nullptr;
    check(tv_extract_viewport(src.get(), yaw, pitch, fov, w, h, &raw));
    ImageH view(raw);
    check(tv_image_save_ppm(view.get(), out.c_str()));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"360 video view-mode decision pipeline"};
    app.set_version_flag("--version", std::string(tv_version()));
    app.require_subcommand(1);

    std::vector<std::string> keys;
    try {
        keys = config_keys();
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return static_cast<int>(f.status);
    }

    // cvvp-gt
    ConfigFlags gt_flags;
    std::string gt_labels, gt_out;
    auto* gt = app.add_subcommand("cvvp-gt", "ground-truth CVVP per frame from viewer labels");
    gt->add_option("--labels", gt_labels, "label trace file")->required();
    gt->add_option("-o,--out", gt_out, "output prediction-format file")->required();
    gt_flags.attach(gt, keys);

    // stabilize
    ConfigFlags st_flags;
    std::string st_in, st_out;
    bool st_brute = false;
    auto* st = app.add_subcommand("stabilize", "per-frame CVVP to a stabilized per-second mode schedule");
    st->add_option("--cvvp", st_in, "CVVP file (predicted or ground truth)")->required();
    st->add_option("-o,--out", st_out, "output schedule file")->required();
    st->add_flag("--brute-force", st_brute, "exhaustive search; prints the candidate count");
    st_flags.attach(st, keys);

    // decide
    ConfigFlags de_flags;
    std::string de_schedule, de_events, de_out;
    std::vector<int> de_viewers;
    auto* de = app.add_subcommand("decide", "replay the per-viewer view-mode state machine");
    de->add_option("--schedule", de_schedule, "schedule file")->required();
    de->add_option("--events", de_events, "viewer event file");
    de->add_option("--viewers", de_viewers, "viewer ids to trace even without events")->delimiter(',');
    de->add_option("-o,--out", de_out, "output mode trace file")->required();
    de_flags.attach(de, keys);

    // simulate
    ConfigFlags si_flags;
    SimulateArgs si_args;
    auto* si = app.add_subcommand("simulate", "evaluate the three mode strategies over one or more videos");
    si->add_option("--labels", si_args.labels, "label trace file (repeatable)")->required();
    si->add_option("--trajectory", si_args.trajectories, "saliency trajectory file (repeatable)")->required();
    si->add_option("--predictions", si_args.predictions, "predicted CVVP file (repeatable)");
    si->add_option("--events", si_args.events, "VIDEO=PATH viewer event file (repeatable)");
    si->add_option("-o,--out", si_args.out_dir, "output directory")->required();
    si->add_flag("-q,--quiet", si_args.quiet, "do not print the summary");
    si_flags.attach(si, keys);

    // report
    std::string re_path;
    auto* re = app.add_subcommand("report", "print a summary table from a simulate output");
    re->add_option("path", re_path, "output directory or summary.json")->required();

    // cubemap
    std::string cu_in, cu_out;
    int cu_size = 256;
    auto* cu = app.add_subcommand("cubemap", "split an equirectangular PPM into six cube faces");
    cu->add_option("--in", cu_in, "equirectangular PPM")->required();
    cu->add_option("--face-size", cu_size, "face edge in pixels");
    cu->add_option("-o,--out", cu_out, "output directory")->required();

    // viewport
    std::string vp_in, vp_out;
    double vp_yaw = 0, vp_pitch = 0, vp_fov = 90;
    int vp_w = 640, vp_h = 360;
    auto* vp = app.add_subcommand("viewport", "render a perspective view from an equirectangular PPM");
    vp->add_option("--in", vp_in, "equirectangular PPM")->required();
    vp->add_option("--yaw", vp_yaw, "center yaw, degrees");
    vp->add_option("--pitch", vp_pitch, "center pitch, degrees");
    vp->add_option("--fov", vp_fov, "horizontal field of view, degrees");
    vp->add_option("--width", vp_w);
    vp->add_option("--height", vp_h);
    vp->add_option("-o,--out", vp_out, "output PPM")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gt) return cmd_cvvp_gt(gt_flags, gt_labels, gt_out);
        if (*st) return cmd_stabilize(st_flags, st_in, st_out, st_brute);
        if (*de) return cmd_decide(de_flags, de_schedule, de_events, de_viewers, de_out);
        if (*si) return cmd_simulate(si_flags, si_args);
        if (*re) return cmd_report(re_path);
        if (*cu) return cmd_cubemap(cu_in, cu_size, cu_out);
        if (*vp) return cmd_viewport(vp_in, vp_yaw, vp_pitch, vp_fov, vp_w, vp_h, vp_out);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return static_cast<int>(f.status);
    }
    return 0;
}
