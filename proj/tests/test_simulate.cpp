#include <doctest.h>

#include <cmath>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support.hpp"
#include "tripleview/error.hpp"
#include "tripleview/simulate.hpp"

using namespace tripleview;

namespace {

// fps 2, `seconds` long; viewers wander around two alternating foci.
VideoInput synthetic(const std::string& id, int seconds, std::uint64_t seed, int viewers = 4) {
    std::mt19937_64 rng(seed);
    VideoInput in;
    in.labels.video_id = id;
    in.labels.fps = 2;
    for (int v = 0; v < viewers; ++v) in.labels.viewer_ids.push_back(v * 10);
    in.saliency.video_id = id;
    in.saliency.fps = 2;
    for (int f = 0; f < seconds * 2; ++f) {
        const bool together = (f / 16) % 2 == 0;
        std::vector<ViewingDirection> row;
        for (int v = 0; v < viewers; ++v) {
            const double base = together ? 0.0 : v * 90.0;
            row.emplace_back(base + testsupport::uniform(rng, -10, 10), testsupport::uniform(rng, -10, 10));
        }
        in.labels.frames.push_back(row);
        in.saliency.directions.emplace_back(testsupport::uniform(rng, -40, 40), 0.0);
    }
    return in;
}

SimulationConfig sim(double switch_prob = 0.05, std::uint64_t seed = 1) {
    SimulationConfig c;
    c.behavior.switch_prob = switch_prob;
    c.seed = seed;
    return c;
}

ModeSchedule constant(int seconds, std::uint8_t v) { return ModeSchedule{"v", std::vector<std::uint8_t>(seconds, v), 1, 0}; }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("strategy names") {
    for (auto s : kStrategies) CHECK(parse_strategy(to_string(s)) == s);
    CHECK(to_string(Strategy::TripleView) == "triple_view");
    CHECK_THROWS_AS(parse_strategy("nope"), Error);
}

TEST_CASE("everyone agrees and saliency follows them") {
    auto in = synthetic("same", 4, 1);
    for (auto& row : in.labels.frames) std::fill(row.begin(), row.end(), row[0]);
    for (std::size_t f = 0; f < in.labels.frames.size(); ++f) in.saliency.directions[f] = in.labels.frames[f][0];
    const auto r = simulate_strategy(in.labels, in.saliency, Strategy::AutoEnforcedOnly, nullptr, nullptr, sim());
    for (double v : r.frame_importance) CHECK(v == 1.0);
    CHECK(r.mean_importance == 1.0);
}

TEST_CASE("Manual viewers who never switch score 1") {
    const auto in = synthetic("m", 10, 2);
    auto c = sim(0.0);
    c.decision.initial_mode = ViewMode::Manual;
    const auto r = simulate_strategy(in.labels, in.saliency, Strategy::WeakManOnly, nullptr, nullptr, c);
    for (double v : r.frame_importance) CHECK(v == 1.0);
    // Same viewers in Auto-optional watch the trajectory instead.
    const auto ao = simulate_strategy(in.labels, in.saliency, Strategy::WeakManOnly, nullptr, nullptr, sim(0.0));
    const auto ae = simulate_strategy(in.labels, in.saliency, Strategy::AutoEnforcedOnly, nullptr, nullptr, sim(0.0));
    CHECK(ao.frame_importance == ae.frame_importance);
}

TEST_CASE("TripleView degenerates to the single-mode strategies") {
    for (std::uint64_t seed : {1u, 2u, 77u}) {
        const auto in = synthetic("d", 30, seed);
        const auto c = sim(0.2, seed);
        const auto ones = constant(30, 1);
        const auto zeros = constant(30, 0);
        const auto ae = simulate_strategy(in.labels, in.saliency, Strategy::AutoEnforcedOnly, nullptr, nullptr, c);
        const auto wm = simulate_strategy(in.labels, in.saliency, Strategy::WeakManOnly, nullptr, nullptr, c);
        const auto tv1 = simulate_strategy(in.labels, in.saliency, Strategy::TripleView, &ones, nullptr, c);
        const auto tv0 = simulate_strategy(in.labels, in.saliency, Strategy::TripleView, &zeros, nullptr, c);
        CHECK(tv1.frame_importance == ae.frame_importance);
        CHECK(tv0.frame_importance == wm.frame_importance);
        CHECK(wm.frame_importance != ae.frame_importance);
    }
}

TEST_CASE("equal seeds reproduce, different seeds differ") {
    const auto in = synthetic("s", 40, 3);
    const auto a = simulate_strategy(in.labels, in.saliency, Strategy::WeakManOnly, nullptr, nullptr, sim(0.3, 5));
    const auto b = simulate_strategy(in.labels, in.saliency, Strategy::WeakManOnly, nullptr, nullptr, sim(0.3, 5));
    const auto c = simulate_strategy(in.labels, in.saliency, Strategy::WeakManOnly, nullptr, nullptr, sim(0.3, 6));
    CHECK(a.frame_importance == b.frame_importance);
    CHECK(a.frame_importance != c.frame_importance);
}

TEST_CASE("enforced importance is bounded by the frame's CVVP") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto in = synthetic("u", 20, seed, 6);
        const auto truth = cvvp_values(video_cvvp_series(in.labels, ImportanceParams{}));
        const auto ae = simulate_strategy(in.labels, in.saliency, Strategy::AutoEnforcedOnly, nullptr, nullptr, sim());
        for (std::size_t f = 0; f < truth.size(); ++f) CHECK(ae.frame_importance[f] <= truth[f]);
    }
}

TEST_CASE("missed Manual views score zero for that viewer") {
    const auto in = synthetic("x", 6, 4);
    auto c = sim(0.0);
    c.decision.initial_mode = ViewMode::Manual;
    c.behavior.manual_miss_prob = 1.0;
    const auto r = simulate_strategy(in.labels, in.saliency, Strategy::WeakManOnly, nullptr, nullptr, c);
    for (double v : r.frame_importance) CHECK(v == 0.0);
}

TEST_CASE("explicit events replace the behaviour model") {
    const auto in = synthetic("e", 10, 5);
    // Viewer 0 goes Manual at second 2; everybody else stays Auto-optional.
    const std::vector<ViewerEvent> ev = {{0, 2, EventKind::RequestManual}};
    auto c = sim(0.9);
    c.decision.idle_timeout = kNoIdleTimeout;
    const auto zeros = constant(10, 0);
    const auto r = simulate_strategy(in.labels, in.saliency, Strategy::TripleView, &zeros, &ev, c);
    const auto ae = simulate_strategy(in.labels, in.saliency, Strategy::AutoEnforcedOnly, nullptr, nullptr, c);
    const double n = 4.0;
    for (std::size_t f = 0; f < r.frame_importance.size(); ++f) {
        if (f < 4) {
            CHECK(r.frame_importance[f] == ae.frame_importance[f]);
        } else {
            const int own = importance_for_viewer(in.saliency.directions[f], in.labels.frames[f][0], ImportanceParams{});
            CHECK(r.frame_importance[f] == doctest::Approx(ae.frame_importance[f] + (1 - own) / n));
        }
    }
}

TEST_CASE("input alignment is checked") {
    auto in = synthetic("a", 4, 6);
    in.saliency.directions.pop_back();
    CHECK_THROWS_AS(simulate_strategy(in.labels, in.saliency, Strategy::AutoEnforcedOnly, nullptr, nullptr, sim()),
                    Error);
    const auto ok = synthetic("a", 4, 6);
    CHECK_THROWS_AS(simulate_strategy(ok.labels, ok.saliency, Strategy::TripleView, nullptr, nullptr, sim()), Error);
    const auto shorter = constant(3, 1);
    CHECK_THROWS_AS(simulate_strategy(ok.labels, ok.saliency, Strategy::TripleView, &shorter, nullptr, sim()), Error);
}

TEST_CASE("cvvp error and its CDF") {
    const std::vector<double> truth = {0.5, 1.0, 0.25, 0.75};
    const auto zero = cvvp_error(truth, truth);
    CHECK(zero.mean == 0.0);
    CHECK(zero.cdf.front() == std::pair{0.0, 1.0});

    std::vector<double> shifted;
    for (double t : truth) shifted.push_back(std::min(1.0, t + 0.1));
    const auto e = cvvp_error(shifted, std::vector<double>{0.5, 0.9, 0.25, 0.75});
    CHECK(e.mean == doctest::Approx(0.1));
    REQUIRE(e.cdf.size() == 101);
    CHECK(e.cdf[5].second == 0.0);
    CHECK(e.cdf[11].second == 1.0);
    CHECK(e.cdf[100] == std::pair{1.0, 1.0});
    CHECK_THROWS_AS(cvvp_error(std::vector<double>{0.1}, truth), Error);
}

TEST_CASE("inference accuracy") {
    const ModeSchedule a{"v", {1, 1, 0, 0}, 1, 0};
    const ModeSchedule b{"v", {1, 0, 0, 0}, 1, 0};
    const ModeSchedule c{"v", {0, 0, 1, 1}, 1, 0};
    CHECK(inference_accuracy(a, a) == 1.0);
    CHECK(inference_accuracy(a, b) == 0.75);
    CHECK(inference_accuracy(a, c) == 0.0);
    CHECK_THROWS_AS(inference_accuracy(a, constant(3, 0)), Error);
}

TEST_CASE("evaluation: perfect predictions, exclusion, aggregation") {
    EvaluationConfig cfg;
    cfg.stabilize = StabilizeParams{0.6, 4, 12};
    std::vector<VideoInput> inputs = {synthetic("p", 48, 7), synthetic("q", 48, 8)};
    const auto truth = cvvp_values(video_cvvp_series(inputs[0].labels, ImportanceParams{}));
    inputs[0].predictions = CvvpPredictions{"p", 2, truth};

    // A video where everyone always agrees: all-ones schedule, excluded.
    auto agree = synthetic("r", 48, 9);
    for (auto& row : agree.labels.frames) std::fill(row.begin(), row.end(), row[0]);
    inputs.push_back(agree);

    const auto report = evaluate(inputs, cfg);
    REQUIRE(report.videos.size() == 3);
    CHECK(report.videos[0].accuracy == 1.0);
    CHECK(report.videos[0].error.mean == 0.0);
    CHECK(report.videos[1].predicted_cvvp == report.videos[1].truth_cvvp);
    CHECK(report.excluded_videos == std::vector<std::string>{"r"});
    CHECK(report.videos[2].excluded);

    for (int s = 0; s < 3; ++s) {
        const double expected = (report.videos[0].strategies[s].mean_importance +
                                 report.videos[1].strategies[s].mean_importance) / 2.0;
        CHECK(report.mean_importance[s] == doctest::Approx(expected));
    }
    for (const auto& v : report.videos) {
        CHECK(v.accuracy >= 0.0);
        CHECK(v.accuracy <= 1.0);
        for (const auto& st : v.strategies) {
            CHECK(st.mean_importance >= 0.0);
            CHECK(st.mean_importance <= 1.0);
        }
    }

    cfg.exclude_all_enforced = false;
    CHECK(evaluate(inputs, cfg).excluded_videos.empty());

    cfg.threads = 3;
    cfg.exclude_all_enforced = true;
    const auto threaded = evaluate(inputs, cfg);
    for (int i = 0; i < 3; ++i)
        for (int s = 0; s < 3; ++s)
            CHECK(threaded.videos[i].strategies[s].frame_importance == report.videos[i].strategies[s].frame_importance);
}

TEST_CASE("everything excluded gives null importance") {
    auto agree = synthetic("r", 24, 9);
    for (auto& row : agree.labels.frames) std::fill(row.begin(), row.end(), row[0]);
    EvaluationConfig cfg;
    cfg.stabilize = StabilizeParams{0.6, 4, 12};
    const std::vector<VideoInput> inputs = {agree};
    const auto report = evaluate(inputs, cfg);
    CHECK(std::isnan(report.mean_importance[0]));
    testsupport::TempDir dir;
    write_report(report, dir.path());
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["aggregate"]["importance"]["triple_view"].is_null());
}

TEST_CASE("report files: reproducible and consistent with per-frame output") {
    EvaluationConfig cfg;
    cfg.stabilize = StabilizeParams{0.6, 4, 12};
    cfg.simulation.seed = 42;
    std::vector<VideoInput> inputs = {synthetic("p", 36, 1), synthetic("q", 30, 2)};

    testsupport::TempDir a, b;
    write_report(evaluate(inputs, cfg), a.path());
    write_report(evaluate(inputs, cfg), b.path());
    for (const char* f : {"summary.json", "strategies.csv", "frames.csv", "seconds.csv", "cdf.csv"}) {
        CAPTURE(f);
        CHECK(!slurp(a / f).empty());
        CHECK(slurp(a / f) == slurp(b / f));
    }

    // Recompute per-video importance from frames.csv.
    std::istringstream frames(slurp(a / "frames.csv"));
    std::string line;
    std::getline(frames, line);
    CHECK(line == "video,frame,truth_cvvp,predicted_cvvp,auto_enforced_only,weak_man_only,triple_view");
    std::map<std::string, std::array<double, 3>> sums;
    std::map<std::string, int> counts;
    while (std::getline(frames, line)) {
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
        REQUIRE(cols.size() == 7);
        for (int s = 0; s < 3; ++s) sums[cols[0]][s] += std::stod(cols[4 + s]);
        counts[cols[0]]++;
    }
    const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
    for (const auto& v : summary["videos"]) {
        const std::string id = v["video"];
        int s = 0;
        for (const char* name : {"auto_enforced_only", "weak_man_only", "triple_view"}) {
            CHECK(v["importance"][name].get<double>() == doctest::Approx(sums[id][s] / counts[id]).epsilon(1e-12));
            ++s;
        }
    }
    CHECK(counts["p"] == 72);
}

}  // TEST_SUITE
