// Exercises the shared library only through its C header.
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "tripleview/tripleview.h"

namespace {

struct Config {
    tv_config* p = nullptr;
    Config() { REQUIRE(tv_config_create(&p) == TV_OK); }
    ~Config() { tv_config_free(p); }
};

std::string take(char* s) {
    std::string out = s ? s : "";
    tv_string_free(s);
    return out;
}

std::string fx(const char* name) { return testsupport::fixture(name).string(); }

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("status names and version") {
    CHECK(std::string(tv_status_name(TV_OK)) == "ok");
    CHECK(std::string(tv_status_name(TV_ERR_BUDGET_EXCEEDED)) == "budget_exceeded");
    CHECK(std::strlen(tv_version()) > 0);
}

TEST_CASE("null arguments are rejected, not dereferenced") {
    double d = 0;
    CHECK(tv_great_circle_distance(0, 0, 0, 0, nullptr) == TV_ERR_INVALID_ARGUMENT);
    CHECK(std::string(tv_last_error()).size() > 0);
    CHECK(tv_config_create(nullptr) == TV_ERR_INVALID_ARGUMENT);
    CHECK(tv_labels_load(nullptr, nullptr, nullptr) == TV_ERR_INVALID_ARGUMENT);
    CHECK(tv_evaluation_importance(nullptr, TV_STRATEGY_TRIPLE_VIEW, &d) == TV_ERR_INVALID_ARGUMENT);
    CHECK(tv_labels_frame_count(nullptr) == 0);
    tv_config_free(nullptr);
    tv_labels_free(nullptr);
    tv_string_free(nullptr);
}

TEST_CASE("config through the C surface") {
    Config c;
    CHECK(tv_config_set(c.p, "t_min", "7") == TV_OK);
    char* v = nullptr;
    REQUIRE(tv_config_get(c.p, "t_min", &v) == TV_OK);
    CHECK(take(v) == "7");
    CHECK(tv_config_set(c.p, "bogus", "1") == TV_ERR_INVALID_ARGUMENT);
    CHECK(std::string(tv_last_error()).find("bogus") != std::string::npos);
    CHECK(tv_config_set(c.p, "t_min", "x") == TV_ERR_INVALID_ARGUMENT);
    CHECK(tv_config_set(c.p, "t_min", "500") == TV_OK);
    CHECK(tv_config_validate(c.p) == TV_ERR_INVALID_ARGUMENT);
    CHECK(tv_config_set(c.p, "t_min", "20") == TV_OK);
    char* all = nullptr;
    REQUIRE(tv_config_serialize(c.p, &all) == TV_OK);
    CHECK(take(all).find("th_dist = 30\n") != std::string::npos);
    CHECK(tv_config_load(c.p, "/nonexistent/x.txt") == TV_ERR_IO);
}

TEST_CASE("geometry and frame cvvp") {
    double d = 0;
    REQUIRE(tv_great_circle_distance(179, 0, -179, 0, &d) == TV_OK);
    CHECK(d == doctest::Approx(2.0));
    CHECK(tv_great_circle_distance(0, 91, 0, 0, &d) == TV_ERR_INVALID_ARGUMENT);

    const double yaw[] = {0, 59};
    const double pitch[] = {0, 0};
    double c = 0, ay = 0, ap = 0;
    REQUIRE(tv_frame_cvvp(yaw, pitch, 2, nullptr, &c, &ay, &ap) == TV_OK);
    CHECK(c == 1.0);
    CHECK(tv_frame_cvvp(yaw, pitch, 0, nullptr, &c, &ay, &ap) == TV_ERR_INVALID_ARGUMENT);
}

TEST_CASE("load errors carry the right status") {
    tv_labels* l = nullptr;
    CHECK(tv_labels_load("/nonexistent/l.jsonl", nullptr, &l) == TV_ERR_IO);
    CHECK(l == nullptr);
    CHECK(std::string(tv_last_error()).find("/nonexistent/l.jsonl") != std::string::npos);
    testsupport::TempDir dir;
    const auto bad = (dir / "bad.jsonl").string();
    std::ofstream(bad) << "{not json\n";
    CHECK(tv_labels_load(bad.c_str(), nullptr, &l) == TV_ERR_PARSE);
}

TEST_CASE("labels, cvvp and stabilization") {
    tv_labels* labels = nullptr;
    REQUIRE(tv_labels_load(fx("identical.labels.jsonl").c_str(), nullptr, &labels) == TV_OK);
    CHECK(tv_labels_viewer_count(labels) == 6);
    CHECK(tv_labels_frame_count(labels) == 30);
    double yaw = 0, pitch = 0;
    REQUIRE(tv_labels_get(labels, 0, 0, &yaw, &pitch) == TV_OK);
    CHECK(yaw == 40.0);
    CHECK(pitch == 10.0);
    CHECK(tv_labels_get(labels, 30, 0, &yaw, &pitch) == TV_ERR_INVALID_ARGUMENT);

    tv_cvvp* series = nullptr;
    REQUIRE(tv_cvvp_ground_truth(labels, nullptr, &series) == TV_OK);
    std::vector<double> values(tv_cvvp_length(series));
    REQUIRE(tv_cvvp_values(series, values.data(), values.size()) == TV_OK);
    for (double v : values) CHECK(v == 1.0);
    double first = 0;
    CHECK(tv_cvvp_values(series, &first, 1) == TV_OK);
    CHECK(first == 1.0);
    CHECK(tv_cvvp_values(series, nullptr, 3) == TV_ERR_INVALID_ARGUMENT);
    tv_cvvp_free(series);
    tv_labels_free(labels);

    Config c;
    tv_cvvp* pred = nullptr;
    REQUIRE(tv_cvvp_load(fx("oscillating.pred.jsonl").c_str(), c.p, &pred) == TV_OK);
    tv_schedule* s = nullptr;
    std::uint64_t candidates = 0;
    REQUIRE(tv_stabilize(pred, c.p, 1, &s, &candidates) == TV_OK);
    CHECK(candidates == 49882);
    CHECK(tv_schedule_is_feasible(s) == 1);
    std::vector<std::uint8_t> bits(tv_schedule_length(s));
    REQUIRE(tv_schedule_values(s, bits.data(), bits.size()) == TV_OK);
    tv_schedule* dp = nullptr;
    REQUIRE(tv_stabilize(pred, c.p, 0, &dp, nullptr) == TV_OK);
    std::vector<std::uint8_t> dp_bits(tv_schedule_length(dp));
    REQUIRE(tv_schedule_values(dp, dp_bits.data(), dp_bits.size()) == TV_OK);
    CHECK(bits == dp_bits);

    REQUIRE(tv_config_set(c.p, "candidate_budget", "100") == TV_OK);
    tv_schedule* none = nullptr;
    CHECK(tv_stabilize(pred, c.p, 1, &none, nullptr) == TV_ERR_BUDGET_EXCEEDED);
    CHECK(none == nullptr);

    testsupport::TempDir dir;
    const auto path = (dir / "s.jsonl").string();
    REQUIRE(tv_schedule_save(s, path.c_str()) == TV_OK);
    tv_schedule* back = nullptr;
    REQUIRE(tv_schedule_load(path.c_str(), &back) == TV_OK);
    CHECK(tv_schedule_length(back) == bits.size());
    tv_schedule_free(back);
    tv_schedule_free(dp);
    tv_schedule_free(s);
    tv_cvvp_free(pred);

    std::uint64_t n = 0;
    REQUIRE(tv_candidate_count(120, 20, &n) == TV_OK);
    CHECK(n == 49882);
}

TEST_CASE("session traces") {
    tv_schedule* s = nullptr;
    testsupport::TempDir dir;
    const auto path = (dir / "s.jsonl").string();
    {
        std::ofstream out(path);
        out << R"({"video":"v","t_min":2,"clip_len":6})" << '\n';
        const int bits[] = {0, 0, 1, 1, 0, 0};
        for (int i = 0; i < 6; ++i) out << R"({"video":"v","second":)" << i << R"(,"value":)" << bits[i] << "}\n";
    }
    REQUIRE(tv_schedule_load(path.c_str(), &s) == TV_OK);
    const int viewers[] = {4};
    tv_mode_traces* t = nullptr;
    REQUIRE(tv_run_session(s, nullptr, nullptr, viewers, 1, &t) == TV_OK);
    CHECK(tv_mode_traces_viewer_count(t) == 1);
    CHECK(tv_mode_traces_seconds(t) == 6);
    int id = -1, suppressed = -1;
    tv_view_mode mode = TV_MODE_MANUAL;
    REQUIRE(tv_mode_traces_get(t, 0, 2, &id, &mode, &suppressed) == TV_OK);
    CHECK(id == 4);
    CHECK(mode == TV_MODE_AUTO_ENFORCED);
    CHECK(suppressed == 0);
    REQUIRE(tv_mode_traces_get(t, 0, 5, &id, &mode, &suppressed) == TV_OK);
    CHECK(mode == TV_MODE_AUTO_OPTIONAL);
    CHECK(tv_mode_traces_save(t, (dir / "m.jsonl").string().c_str()) == TV_OK);
    tv_mode_traces_free(t);

    tv_events* ev = nullptr;
    REQUIRE(tv_events_load(fx("demo.events.jsonl").c_str(), &ev) == TV_OK);
    CHECK(tv_events_count(ev) == 9);
    // The demo events run past six seconds.
    const tv_status st = tv_run_session(s, ev, nullptr, nullptr, 0, &t);
    CAPTURE(std::string(tv_last_error()));
    CHECK(st == TV_ERR_VALIDATION);
    tv_events_free(ev);
    tv_schedule_free(s);
}

TEST_CASE("evaluation end to end") {
    Config c;
    REQUIRE(tv_config_set(c.p, "seed", "3") == TV_OK);
    tv_evaluation* e = nullptr;
    REQUIRE(tv_evaluation_create(c.p, &e) == TV_OK);
    double v = 0;
    CHECK(tv_evaluation_importance(e, TV_STRATEGY_TRIPLE_VIEW, &v) == TV_ERR_INVALID_ARGUMENT);
    for (const char* name : {"synth_a", "synth_c"}) {
        const std::string base = name;
        tv_labels* l = nullptr;
        tv_trajectory* t = nullptr;
        tv_cvvp* p = nullptr;
        REQUIRE(tv_labels_load(fx((base + ".labels.jsonl").c_str()).c_str(), c.p, &l) == TV_OK);
        REQUIRE(tv_trajectory_load(fx((base + ".saliency.jsonl").c_str()).c_str(), c.p, &t) == TV_OK);
        REQUIRE(tv_cvvp_load(fx((base + ".pred.jsonl").c_str()).c_str(), c.p, &p) == TV_OK);
        REQUIRE(tv_evaluation_add_video(e, l, t, p, nullptr) == TV_OK);
        tv_cvvp_free(p);
        tv_trajectory_free(t);
        tv_labels_free(l);
    }
    REQUIRE(tv_evaluation_run(e) == TV_OK);
    CHECK(tv_evaluation_video_count(e) == 2);
    CHECK(tv_evaluation_excluded_count(e) == 1);
    double ae = 0, tv = 0, video_tv = 0;
    REQUIRE(tv_evaluation_importance(e, TV_STRATEGY_AUTO_ENFORCED_ONLY, &ae) == TV_OK);
    REQUIRE(tv_evaluation_importance(e, TV_STRATEGY_TRIPLE_VIEW, &tv) == TV_OK);
    REQUIRE(tv_evaluation_video_importance(e, 0, TV_STRATEGY_TRIPLE_VIEW, &video_tv) == TV_OK);
    CHECK(tv == video_tv);
    CHECK(ae >= 0.0);
    CHECK(tv <= 1.0);
    CHECK(tv_evaluation_video_importance(e, 2, TV_STRATEGY_TRIPLE_VIEW, &v) == TV_ERR_INVALID_ARGUMENT);

    testsupport::TempDir dir;
    REQUIRE(tv_evaluation_write(e, dir.path().string().c_str()) == TV_OK);
    char* text = nullptr;
    REQUIRE(tv_report_render((dir / "summary.json").string().c_str(), &text) == TV_OK);
    const std::string table = take(text);
    CHECK(table.find("synth_a") != std::string::npos);
    CHECK(table.find("(aggregate)") != std::string::npos);
    tv_evaluation_free(e);
}

TEST_CASE("images") {
    testsupport::TempDir dir;
    const auto path = (dir / "equirect.ppm").string();
    {
        std::ofstream out(path, std::ios::binary);
        out << "P6\n8 4\n255\n";
        for (int i = 0; i < 8 * 4; ++i) out << static_cast<char>(i * 7) << static_cast<char>(100) << static_cast<char>(200);
    }
    tv_image* eq = nullptr;
    REQUIRE(tv_image_load_ppm(path.c_str(), &eq) == TV_OK);
    int w = 0, h = 0, ch = 0;
    REQUIRE(tv_image_size(eq, &w, &h, &ch) == TV_OK);
    CHECK(w == 8);
    CHECK(h == 4);
    CHECK(ch == 3);
    tv_image* faces[6] = {};
    REQUIRE(tv_equirect_to_cubemap(eq, 4, faces) == TV_OK);
    for (auto* f : faces) {
        REQUIRE(tv_image_size(f, &w, &h, &ch) == TV_OK);
        CHECK(w == 4);
        tv_image_free(f);
    }
    tv_image* vp = nullptr;
    REQUIRE(tv_extract_viewport(eq, 0, 0, 90, 6, 4, &vp) == TV_OK);
    CHECK(tv_image_save_ppm(vp, (dir / "vp.ppm").string().c_str()) == TV_OK);
    tv_image_free(vp);
    tv_image* wide = nullptr;
    CHECK(tv_extract_viewport(eq, 0, 0, 200, 6, 4, &wide) == TV_ERR_INVALID_ARGUMENT);
    CHECK(wide == nullptr);
    tv_image_free(eq);
}

}  // TEST_SUITE
