#include "tripleview/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tripleview/error.hpp"

namespace tripleview {

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::AutoEnforcedOnly: return "auto_enforced_only";
        case Strategy::WeakManOnly: return "weak_man_only";
        case Strategy::TripleView: return "triple_view";
    }
    return "?";
}

Strategy parse_strategy(std::string_view text) {
    for (Strategy s : kStrategies) {
        if (to_string(s) == text) return s;
    }
    fail(ErrorCode::Parse, "unknown strategy '" + std::string(text) + "'");
}

void BehaviorModel::validate() const {
    if (!(switch_prob >= 0.0 && switch_prob <= 1.0)) fail(ErrorCode::InvalidArgument, "switch_prob must lie in [0, 1]");
    if (!(manual_miss_prob >= 0.0 && manual_miss_prob <= 1.0)) {
        fail(ErrorCode::InvalidArgument, "manual_miss_prob must lie in [0, 1]");
    }
    if (!(miss_margin_deg > 0.0)) fail(ErrorCode::InvalidArgument, "miss_margin_deg must be positive");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

// Portable uniform draw in [0, 1); std::uniform_real_distribution is not
// reproducible across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ViewingDirection offset_direction(const ViewingDirection& from, double distance_deg, double azimuth_deg) {
    const Vec3 l = direction_to_unit_vector(from);
    Vec3 e1 = cross(Vec3{0.0, 0.0, 1.0}, l);
    if (norm(e1) < 1e-12) e1 = {0.0, 1.0, 0.0};
    e1 = normalized(e1);
    const Vec3 e2 = cross(l, e1);
    const double d = distance_deg * kDegToRad;
    const double a = azimuth_deg * kDegToRad;
    Vec3 v;
    for (int i = 0; i < 3; ++i) v[i] = std::cos(d) * l[i] + std::sin(d) * (std::cos(a) * e1[i] + std::sin(a) * e2[i]);
    return unit_vector_to_direction(v);
}

int seconds_for(long frames, int fps) { return static_cast<int>((frames + fps - 1) / fps); }

// modes[viewer][second] under the given schedule bits.
std::vector<std::vector<ViewMode>> viewer_modes(const LabelTraceSet& labels, const std::vector<std::uint8_t>& bits,
                                                const std::vector<ViewerEvent>* events, const SimulationConfig& config) {
    const int total = static_cast<int>(bits.size());
    std::vector<std::vector<ViewMode>> modes(labels.viewer_ids.size(), std::vector<ViewMode>(total));

    if (events != nullptr) {
        ModeSchedule schedule;
        schedule.values = bits;
        const auto traces = run_session(schedule, *events, config.decision, labels.viewer_ids);
        for (std::size_t j = 0; j < labels.viewer_ids.size(); ++j) {
            const auto it = std::find_if(traces.begin(), traces.end(),
                                         [&](const ViewerTrace& t) { return t.viewer == labels.viewer_ids[j]; });
            for (int s = 0; s < total; ++s) modes[j][s] = it->samples[s].mode;
        }
        return modes;
    }

    const double p = config.behavior.switch_prob;
    for (std::size_t j = 0; j < labels.viewer_ids.size(); ++j) {
        const int viewer = labels.viewer_ids[j];
        std::mt19937_64 rng(stream_seed(config.seed, 1, static_cast<std::uint64_t>(viewer)));
        ViewerSessionState state = initial_state(viewer, config.decision);
        std::vector<ViewerEvent> pending;
        for (int s = 0; s < total; ++s) {
            const double draw = uniform01(rng);
            pending.clear();
            if (bits[s] == 0) {
                ViewMode base = state.current_mode;
                if (base == ViewMode::AutoEnforced) {
                    base = config.decision.restore_on_release ? state.held_mode : ViewMode::AutoOptional;
                }
                if (draw < p) {
                    const EventKind kind =
                        base == ViewMode::Manual ? EventKind::RequestAutoOptional : EventKind::RequestManual;
                    pending.push_back({viewer, s, kind});
                    base = base == ViewMode::Manual ? ViewMode::AutoOptional : ViewMode::Manual;
                }
                // A Manual viewer keeps steering towards their own view.
                if (base == ViewMode::Manual) pending.push_back({viewer, s, EventKind::SteeringInput});
            }
            state = step(state, s, bits[s], pending, config.decision);
            modes[j][s] = state.current_mode;
        }
    }
    return modes;
}

}  // namespace

StrategyResult simulate_strategy(const LabelTraceSet& labels, const Trajectory& saliency, Strategy strategy,
                                 const ModeSchedule* schedule, const std::vector<ViewerEvent>* events,
                                 const SimulationConfig& config) {
    config.importance.validate();
    config.decision.validate();
    config.behavior.validate();
    const long frames = labels.frame_count();
    if (frames == 0 || labels.viewer_ids.empty()) fail(ErrorCode::InvalidArgument, "label set is empty");
    if (static_cast<long>(saliency.directions.size()) != frames) {
        std::ostringstream msg;
        msg << "video '" << labels.video_id << "': trajectory has " << saliency.directions.size()
            << " frames, labels have " << frames;
        fail(ErrorCode::Validation, msg.str());
    }
    const int fps = labels.fps;
    const int total = seconds_for(frames, fps);
    const auto n = static_cast<double>(labels.viewer_count());

    StrategyResult out;
    out.strategy = strategy;
    out.frame_importance.resize(static_cast<std::size_t>(frames));

    if (strategy == Strategy::AutoEnforcedOnly) {
        for (long f = 0; f < frames; ++f) {
            out.frame_importance[f] = static_cast<double>(importance_count(saliency.directions[f], labels.frame(f),
                                                                           config.importance)) / n;
        }
    } else {
        std::vector<std::uint8_t> bits(total, 0);
        if (strategy == Strategy::TripleView) {
            if (schedule == nullptr) fail(ErrorCode::InvalidArgument, "TripleView needs a mode schedule");
            if (schedule->seconds() < total) {
                std::ostringstream msg;
                msg << "video '" << labels.video_id << "': schedule covers " << schedule->seconds() << " s, video needs "
                    << total << " s";
                fail(ErrorCode::Validation, msg.str());
            }
            bits.assign(schedule->values.begin(), schedule->values.begin() + total);
        }
        const auto modes = viewer_modes(labels, bits, events, config);

        // Which (viewer, second) pairs a Manual viewer misses their view in.
        std::vector<std::vector<double>> miss_azimuth(labels.viewer_ids.size(), std::vector<double>(total, -1.0));
        if (config.behavior.manual_miss_prob > 0.0) {
            for (std::size_t j = 0; j < labels.viewer_ids.size(); ++j) {
                std::mt19937_64 rng(stream_seed(config.seed, 2, static_cast<std::uint64_t>(labels.viewer_ids[j])));
                for (int s = 0; s < total; ++s) {
                    const double draw = uniform01(rng);
                    const double azimuth = 360.0 * uniform01(rng);
                    if (draw < config.behavior.manual_miss_prob) miss_azimuth[j][s] = azimuth;
                }
            }
        }
        const double miss_distance = config.importance.th_dist + config.behavior.miss_margin_deg;

        for (long f = 0; f < frames; ++f) {
            const int s = static_cast<int>(f / fps);
            const auto row = labels.frame(f);
            int count = 0;
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (modes[j][s] == ViewMode::Manual) {
                    if (miss_azimuth[j][s] >= 0.0) {
                        count += importance_for_viewer(offset_direction(row[j], miss_distance, miss_azimuth[j][s]),
                                                       row[j], config.importance);
                    } else {
                        count += importance_for_viewer(row[j], row[j], config.importance);
                    }
                } else {
                    count += importance_for_viewer(saliency.directions[f], row[j], config.importance);
                }
            }
            out.frame_importance[f] = static_cast<double>(count) / n;
        }
    }

    double sum = 0.0;
    for (double v : out.frame_importance) sum += v;
    out.mean_importance = sum / static_cast<double>(frames);
    return out;
}

std::vector<std::pair<double, double>> error_cdf(std::span<const double> errors) {
    std::vector<double> sorted(errors.begin(), errors.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> cdf;
    cdf.reserve(101);
    for (int k = 0; k <= 100; ++k) {
        const double x = k / 100.0;
        const auto below = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
        const double frac = sorted.empty() ? 0.0 : static_cast<double>(below) / static_cast<double>(sorted.size());
        cdf.emplace_back(x, frac);
    }
    return cdf;
}

CvvpError cvvp_error(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size()) {
        std::ostringstream msg;
        msg << "prediction has " << predicted.size() << " frames, ground truth has " << truth.size();
        fail(ErrorCode::Validation, msg.str());
    }
    if (truth.empty()) fail(ErrorCode::InvalidArgument, "cannot score an empty series");
    CvvpError out;
    out.errors.reserve(truth.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        out.errors.push_back(std::abs(predicted[i] - truth[i]));
        sum += out.errors.back();
    }
    out.mean = sum / static_cast<double>(truth.size());
    out.cdf = error_cdf(out.errors);
    return out;
}

double inference_accuracy(const ModeSchedule& predicted, const ModeSchedule& truth) {
    if (predicted.seconds() != truth.seconds()) {
        std::ostringstream msg;
        msg << "schedules differ in length: " << predicted.seconds() << " vs " << truth.seconds();
        fail(ErrorCode::Validation, msg.str());
    }
    if (truth.seconds() == 0) fail(ErrorCode::InvalidArgument, "cannot score empty schedules");
    int agree = 0;
    for (int s = 0; s < truth.seconds(); ++s) agree += predicted.values[s] == truth.values[s] ? 1 : 0;
    return static_cast<double>(agree) / static_cast<double>(truth.seconds());
}

namespace {

VideoReport evaluate_video(const VideoInput& input, const EvaluationConfig& config) {
    const LabelTraceSet& labels = input.labels;
    VideoReport r;
    r.video_id = labels.video_id;
    r.fps = labels.fps;
    r.viewer_count = labels.viewer_count();
    r.has_predictions = input.predictions.has_value();

    if (input.saliency.video_id != labels.video_id) {
        fail(ErrorCode::Validation, "trajectory video '" + input.saliency.video_id + "' does not match labels video '" +
                                        labels.video_id + "'");
    }
    r.truth_cvvp = cvvp_values(video_cvvp_series(labels, config.simulation.importance, config.grid_res, 1));
    if (input.predictions) {
        if (input.predictions->video_id != labels.video_id) {
            fail(ErrorCode::Validation, "prediction video '" + input.predictions->video_id +
                                            "' does not match labels video '" + labels.video_id + "'");
        }
        r.predicted_cvvp = input.predictions->values;
    } else {
        r.predicted_cvvp = r.truth_cvvp;
    }
    try {
        r.error = cvvp_error(r.predicted_cvvp, r.truth_cvvp);
    } catch (const Error& e) {
        throw Error(e.code(), "video '" + labels.video_id + "': " + e.what());
    }

    r.truth_per_second = per_second_average(r.truth_cvvp, labels.fps);
    r.predicted_per_second = per_second_average(r.predicted_cvvp, labels.fps);
    r.truth_schedule = stabilize_video(normalize(r.truth_per_second, config.stabilize.th_cvvp), config.stabilize).schedule;
    r.predicted_schedule =
        stabilize_video(normalize(r.predicted_per_second, config.stabilize.th_cvvp), config.stabilize).schedule;
    r.truth_schedule.video_id = r.predicted_schedule.video_id = labels.video_id;
    r.accuracy = inference_accuracy(r.predicted_schedule, r.truth_schedule);

    SimulationConfig sim = config.simulation;
    sim.seed = stream_seed(config.simulation.seed, 3, hash_string(labels.video_id));
    const std::vector<ViewerEvent>* events = input.events ? &*input.events : nullptr;
    for (Strategy s : kStrategies) {
        r.strategies[static_cast<int>(s)] =
            simulate_strategy(labels, input.saliency, s, s == Strategy::TripleView ? &r.predicted_schedule : nullptr,
                              events, sim);
    }
    r.excluded = config.exclude_all_enforced &&
                 std::all_of(r.predicted_schedule.values.begin(), r.predicted_schedule.values.end(),
                             [](std::uint8_t b) { return b == 1; });
    return r;
}

}  // namespace

EvaluationReport evaluate(std::span<const VideoInput> inputs, const EvaluationConfig& config) {
    config.simulation.importance.validate();
    config.stabilize.validate();
    EvaluationReport report;
    report.videos.resize(inputs.size());

    unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(inputs.size(), 1)));
    std::vector<std::exception_ptr> errors(inputs.size());
    auto work = [&](std::size_t begin, std::size_t step) {
        for (std::size_t i = begin; i < inputs.size(); i += step) {
            try {
                report.videos[i] = evaluate_video(inputs[i], config);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<double> pooled;
    double accuracy_sum = 0.0;
    std::array<double, 3> importance_sum{};
    int included = 0;
    for (const auto& v : report.videos) {
        pooled.insert(pooled.end(), v.error.errors.begin(), v.error.errors.end());
        accuracy_sum += v.accuracy;
        if (v.excluded) {
            report.excluded_videos.push_back(v.video_id);
            continue;
        }
        ++included;
        for (int s = 0; s < 3; ++s) importance_sum[s] += v.strategies[s].mean_importance;
    }
    if (!pooled.empty()) {
        double sum = 0.0;
        for (double e : pooled) sum += e;
        report.mean_error = sum / static_cast<double>(pooled.size());
    }
    report.error_cdf = error_cdf(pooled);
    report.mean_accuracy = report.videos.empty() ? 0.0 : accuracy_sum / static_cast<double>(report.videos.size());
    for (int s = 0; s < 3; ++s) {
        report.mean_importance[s] =
            included > 0 ? importance_sum[s] / included : std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

namespace {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::ofstream open_report_file(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    return out;
}

nlohmann::ordered_json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace

void write_report(const EvaluationReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());

    using oj = nlohmann::ordered_json;
    oj summary;
    oj videos = oj::array();
    for (const auto& v : report.videos) {
        oj importance;
        for (Strategy s : kStrategies) importance[std::string(to_string(s))] = v.strategies[static_cast<int>(s)].mean_importance;
        videos.push_back(oj{{"video", v.video_id},
                            {"frames", v.truth_cvvp.size()},
                            {"seconds", v.truth_schedule.seconds()},
                            {"viewers", v.viewer_count},
                            {"has_predictions", v.has_predictions},
                            {"mean_error", v.error.mean},
                            {"accuracy", v.accuracy},
                            {"excluded", v.excluded},
                            {"importance", importance}});
    }
    oj importance;
    for (Strategy s : kStrategies) importance[std::string(to_string(s))] = json_number(report.mean_importance[static_cast<int>(s)]);
    summary["videos"] = videos;
    summary["aggregate"] = oj{{"mean_error", report.mean_error},
                              {"mean_accuracy", report.mean_accuracy},
                              {"importance", importance},
                              {"excluded_videos", report.excluded_videos}};
    {
        auto out = open_report_file(out_dir / "summary.json");
        out << summary.dump(2) << '\n';
    }
    {
        auto out = open_report_file(out_dir / "strategies.csv");
        out << "video,strategy,importance,excluded\n";
        for (const auto& v : report.videos) {
            for (Strategy s : kStrategies) {
                out << v.video_id << ',' << to_string(s) << ',' << fmt_double(v.strategies[static_cast<int>(s)].mean_importance)
                    << ',' << (v.excluded ? 1 : 0) << '\n';
            }
        }
    }
    {
        auto out = open_report_file(out_dir / "frames.csv");
        out << "video,frame,truth_cvvp,predicted_cvvp,auto_enforced_only,weak_man_only,triple_view\n";
        for (const auto& v : report.videos) {
            for (std::size_t f = 0; f < v.truth_cvvp.size(); ++f) {
                out << v.video_id << ',' << f << ',' << fmt_double(v.truth_cvvp[f]) << ','
                    << fmt_double(v.predicted_cvvp[f]);
                for (const auto& s : v.strategies) out << ',' << fmt_double(s.frame_importance[f]);
                out << '\n';
            }
        }
    }
    {
        auto out = open_report_file(out_dir / "seconds.csv");
        out << "video,second,truth_avg,predicted_avg,truth_bit,predicted_bit\n";
        for (const auto& v : report.videos) {
            for (std::size_t s = 0; s < v.truth_per_second.size(); ++s) {
                out << v.video_id << ',' << s << ',' << fmt_double(v.truth_per_second[s]) << ','
                    << fmt_double(v.predicted_per_second[s]) << ',' << int{v.truth_schedule.values[s]} << ','
                    << int{v.predicted_schedule.values[s]} << '\n';
            }
        }
    }
    {
        auto out = open_report_file(out_dir / "cdf.csv");
        out << "error,fraction\n";
        for (const auto& [x, frac] : report.error_cdf) out << fmt_double(x) << ',' << fmt_double(frac) << '\n';
    }
}

std::string render_summary(const std::filesystem::path& summary_json) {
    std::ifstream in(summary_json);
    if (!in) fail(ErrorCode::Io, "cannot open " + summary_json.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("videos") || !j.contains("aggregate")) {
        fail(ErrorCode::Parse, summary_json.string() + ": not a report summary");
    }
    auto num = [](const nlohmann::json& v) {
        std::ostringstream s;
        if (v.is_number()) {
            s << std::fixed << std::setprecision(3) << v.get<double>();
        } else {
            s << "n/a";
        }
        return s.str();
    };
    std::ostringstream out;
    out << std::left << std::setw(20) << "video" << std::setw(10) << "error" << std::setw(10) << "accuracy"
        << std::setw(10) << "AE-only" << std::setw(10) << "WM-only" << std::setw(10) << "TripleV" << "excluded\n";
    for (const auto& v : j["videos"]) {
        const auto& imp = v["importance"];
        out << std::left << std::setw(20) << v["video"].get<std::string>() << std::setw(10) << num(v["mean_error"])
            << std::setw(10) << num(v["accuracy"]) << std::setw(10) << num(imp["auto_enforced_only"]) << std::setw(10)
            << num(imp["weak_man_only"]) << std::setw(10) << num(imp["triple_view"])
            << (v["excluded"].get<bool>() ? "yes" : "no") << '\n';
    }
    const auto& a = j["aggregate"];
    const auto& imp = a["importance"];
    out << std::left << std::setw(20) << "(aggregate)" << std::setw(10) << num(a["mean_error"]) << std::setw(10)
        << num(a["mean_accuracy"]) << std::setw(10) << num(imp["auto_enforced_only"]) << std::setw(10)
        << num(imp["weak_man_only"]) << std::setw(10) << num(imp["triple_view"]) << a["excluded_videos"].size()
        << '\n';
    return out.str();
}

}  // namespace tripleview
