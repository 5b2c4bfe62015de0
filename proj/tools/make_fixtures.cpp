// Writes the synthetic fixture corpus used by the tests and the README demo.
//
//   make-fixtures OUT_DIR
//
// Output is a pure function of the constants below, so the committed files
// can be regenerated bit-for-bit.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using ordered = nlohmann::ordered_json;

namespace {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    // Same value on every standard library, unlike uniform_real_distribution.
    double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

double wrap(double yaw) {
    while (yaw > 180.0) yaw -= 360.0;
    while (yaw < -180.0) yaw += 360.0;
    return yaw;
}

class Writer {
public:
    explicit Writer(const fs::path& path) : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
    }
    void line(const ordered& j) { out_ << j.dump() << '\n'; }
    ~Writer() { std::cout << path_.string() << "\n"; }

private:
    std::ofstream out_;
    fs::path path_;
};

struct Dir {
    double yaw, pitch;
};

void write_labels(const fs::path& path, const std::string& video, int fps,
                  const std::vector<std::vector<Dir>>& frames) {
    Writer w(path);
    w.line(ordered{{"video", video}, {"fps", fps}});
    for (std::size_t f = 0; f < frames.size(); ++f)
        for (std::size_t v = 0; v < frames[f].size(); ++v)
            w.line(ordered{{"video", video},
                           {"frame", f},
                           {"viewer", v},
                           {"yaw", round3(frames[f][v].yaw)},
                           {"pitch", round3(frames[f][v].pitch)}});
}

void write_trajectory(const fs::path& path, const std::string& video, int fps, const std::vector<Dir>& dirs) {
    Writer w(path);
    w.line(ordered{{"video", video}, {"fps", fps}, {"source", "saliency"}});
    for (std::size_t f = 0; f < dirs.size(); ++f)
        w.line(ordered{{"video", video}, {"frame", f}, {"yaw", round3(dirs[f].yaw)}, {"pitch", round3(dirs[f].pitch)}});
}

void write_predictions(const fs::path& path, const std::string& video, int fps, const std::vector<double>& values) {
    Writer w(path);
    w.line(ordered{{"video", video}, {"fps", fps}});
    for (std::size_t f = 0; f < values.size(); ++f)
        w.line(ordered{{"video", video}, {"frame", f}, {"cvvp", values[f]}});
}

constexpr int kViewers = 6;

// Octahedron vertices: every pair is 90 or 180 degrees apart.
const Dir kScattered[kViewers] = {{0, 0}, {90, 0}, {180, 0}, {-90, 0}, {0, 89}, {0, -89}};

// A video alternating between converged stretches (everyone near a drifting
// focus) and dispersed stretches. `blocks` lists (seconds, converged).
struct Video {
    std::string id;
    int fps;
    std::vector<std::pair<int, bool>> blocks;
    std::uint64_t seed;
};

void make_video(const fs::path& dir, const Video& spec, bool with_predictions) {
    Rng rng(spec.seed);
    std::vector<std::vector<Dir>> labels;
    std::vector<Dir> saliency;
    std::vector<double> truthish;
    double focus_yaw = rng.range(-180, 180);
    double focus_pitch = rng.range(-20, 20);
    for (const auto& [seconds, converged] : spec.blocks) {
        for (int f = 0; f < seconds * spec.fps; ++f) {
            focus_yaw = wrap(focus_yaw + 0.4);
            focus_pitch = std::clamp(focus_pitch + rng.range(-0.3, 0.3), -40.0, 40.0);
            std::vector<Dir> frame;
            for (int v = 0; v < kViewers; ++v) {
                if (converged) {
                    frame.push_back({wrap(focus_yaw + rng.range(-8, 8)), focus_pitch + rng.range(-6, 6)});
                } else {
                    const Dir& s = kScattered[v];
                    frame.push_back({wrap(s.yaw + focus_yaw + rng.range(-5, 5)),
                                     std::clamp(s.pitch + rng.range(-5, 5), -90.0, 90.0)});
                }
            }
            labels.push_back(frame);
            // The saliency detector mostly tracks the focus, with a slower
            // wobble that sometimes drifts past 30 degrees.
            const double t = static_cast<double>(labels.size()) / spec.fps;
            saliency.push_back({wrap(focus_yaw + 25.0 * std::sin(t / 7.0) + rng.range(-3, 3)),
                                std::clamp(focus_pitch + rng.range(-3, 3), -90.0, 90.0)});
            truthish.push_back(converged ? 1.0 : 1.0 / kViewers);
        }
    }
    write_labels(dir / (spec.id + ".labels.jsonl"), spec.id, spec.fps, labels);
    write_trajectory(dir / (spec.id + ".saliency.jsonl"), spec.id, spec.fps, saliency);
    if (with_predictions) {
        // A noisy regressor: truth plus noise, clamped into (0, 1].
        std::vector<double> pred;
        for (double x : truthish) pred.push_back(round3(std::clamp(x + rng.range(-0.35, 0.35), 0.001, 1.0)));
        write_predictions(dir / (spec.id + ".pred.jsonl"), spec.id, spec.fps, pred);
    }
}

void make_static(const fs::path& dir, const std::string& id, int frames, const std::vector<Dir>& dirs) {
    std::vector<std::vector<Dir>> labels(frames, dirs);
    write_labels(dir / (id + ".labels.jsonl"), id, 30, labels);
}

// Per-second CVVP at fps 1 that flickers faster than t_min around a slow
// trend, for the stabilizer demo and the candidate-count check.
void make_oscillating(const fs::path& dir) {
    Rng rng(7);
    std::vector<double> values;
    for (int s = 0; s < 120; ++s) {
        const double trend = s < 45 ? 0.8 : (s < 85 ? 0.35 : 0.75);
        const double flicker = (s / 3) % 2 == 0 ? 0.15 : -0.15;
        values.push_back(round3(std::clamp(trend + flicker + rng.range(-0.05, 0.05), 0.05, 1.0)));
    }
    write_predictions(dir / "oscillating.pred.jsonl", "oscillating", 1, values);
}

void make_events(const fs::path& dir) {
    Writer w(dir / "demo.events.jsonl");
    const struct {
        int viewer, second;
        const char* kind;
    } rows[] = {{0, 2, "request_manual"},  {0, 5, "steering"},           {1, 8, "request_manual"},
                {0, 25, "request_manual"}, {1, 40, "request_manual"},    {1, 44, "steering"},
                {2, 70, "request_manual"}, {2, 72, "request_auto_optional"}, {0, 100, "request_manual"}};
    for (const auto& r : rows) w.line(ordered{{"viewer", r.viewer}, {"second", r.second}, {"kind", r.kind}});
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make-fixtures OUT_DIR\n";
        return 2;
    }
    const fs::path dir = argv[1];
    fs::create_directories(dir);

    make_static(dir, "identical", 30, std::vector<Dir>(kViewers, Dir{40.0, 10.0}));
    make_static(dir, "scattered", 30, std::vector<Dir>(std::begin(kScattered), std::end(kScattered)));
    make_oscillating(dir);
    make_events(dir);

    make_video(dir, {"synth_a", 5, {{30, true}, {40, false}, {30, true}, {30, false}, {20, true}}, 101}, true);
    make_video(dir, {"synth_b", 5, {{60, false}, {40, true}, {50, false}}, 202}, false);
    // Converged throughout: stabilizes to all-ones and is excluded.
    make_video(dir, {"synth_c", 5, {{80, true}}, 303}, true);
    return 0;
}
