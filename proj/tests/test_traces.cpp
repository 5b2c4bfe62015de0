#include <doctest.h>

#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "support.hpp"
#include "tripleview/error.hpp"
#include "tripleview/traces.hpp"

using namespace tripleview;

namespace {

std::string label_line(const std::string& video, long frame, int viewer, double yaw, double pitch) {
    std::ostringstream s;
    s << R"({"video":")" << video << R"(","frame":)" << frame << R"(,"viewer":)" << viewer << R"(,"yaw":)" << yaw
      << R"(,"pitch":)" << pitch << "}\n";
    return s.str();
}

// Error text from parsing `text` as labels, or "" when it parses.
template <typename Fn>
std::string error_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

LabelTraceSet labels_from(const std::string& text, const LoadOptions& options = {}) {
    std::istringstream in(text);
    return parse_labels(in, "mem", options);
}

CvvpPredictions predictions_from(const std::string& text) {
    std::istringstream in(text);
    return parse_predictions(in, "mem");
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("traces") {

TEST_CASE("2-frame 2-viewer labels") {
    std::string text = R"({"video":"v","fps":25})"
                       "\n";
    for (int f = 0; f < 2; ++f)
        for (int v = 0; v < 2; ++v) text += label_line("v", f, v, 10.0 * v, -5.0 * f);
    const auto set = labels_from(text);
    CHECK(set.video_id == "v");
    CHECK(set.fps == 25);
    CHECK(set.viewer_count() == 2);
    CHECK(set.frame_count() == 2);
    CHECK(set.frame(1)[1] == ViewingDirection(10, -5));
}

TEST_CASE("records may come in any order") {
    std::string text;
    text += label_line("v", 1, 7, 1, 1);
    text += label_line("v", 0, 7, 0, 0);
    text += label_line("v", 1, 3, 3, 3);
    text += label_line("v", 0, 3, 2, 2);
    const auto set = labels_from(text);
    CHECK(set.viewer_ids == std::vector<int>{3, 7});
    CHECK(set.frame(0)[0] == ViewingDirection(2, 2));
    CHECK(set.frame(1)[1] == ViewingDirection(1, 1));
    CHECK(set.fps == kDefaultFps);
}

TEST_CASE("headerless files use the configured frame rate") {
    const auto set = labels_from(label_line("v", 0, 0, 0, 0), LoadOptions{false, 12});
    CHECK(set.fps == 12);
}

TEST_CASE("incomplete viewer coverage is reported with frame and line") {
    std::string text;
    for (int f = 0; f < 7; ++f)
        for (int v = 0; v < 6; ++v)
            if (!(f == 5 && v == 4)) text += label_line("clip", f, v, 0, 0);
    const auto msg = error_of([&] { labels_from(text); });
    CHECK(contains(msg, "incomplete viewer coverage at frame 5"));
    CHECK(contains(msg, "video 'clip'"));
    CHECK(contains(msg, "mem:"));
    CHECK(code_of([&] { labels_from(text); }) == ErrorCode::Validation);
}

TEST_CASE("gap filling holds the previous frame") {
    std::string text;
    text += label_line("v", 0, 0, 1, 1);
    text += label_line("v", 0, 1, 2, 2);
    text += label_line("v", 1, 0, 3, 3);  // viewer 1 missing at frame 1
    text += label_line("v", 3, 0, 4, 4);  // frame 2 missing, viewer 1 missing
    text += label_line("v", 3, 1, 5, 5);
    CHECK_THROWS_AS(labels_from(text), Error);
    const auto set = labels_from(text, LoadOptions{true, kDefaultFps});
    REQUIRE(set.frame_count() == 4);
    CHECK(set.frame(1)[1] == ViewingDirection(2, 2));
    CHECK(set.frame(2)[0] == ViewingDirection(3, 3));
    CHECK(set.frame(2)[1] == ViewingDirection(2, 2));
    CHECK(set.frame(3)[1] == ViewingDirection(5, 5));
}

TEST_CASE("non-contiguous frames are rejected") {
    std::string text = label_line("v", 0, 0, 0, 0) + label_line("v", 2, 0, 0, 0);
    CHECK(contains(error_of([&] { labels_from(text); }), "missing frame 1"));
    CHECK(contains(error_of([&] { labels_from(label_line("v", 1, 0, 0, 0)); }), "missing frame 0"));
}

TEST_CASE("angle ranges are enforced with context") {
    const auto msg = error_of([&] { labels_from(label_line("v", 0, 0, 0, 0) + label_line("v", 1, 0, 0, 95)); });
    CHECK(contains(msg, "pitch 95 outside [-90, 90]"));
    CHECK(contains(msg, "frame 1"));
    CHECK(contains(msg, "mem:2"));
    CHECK(contains(error_of([&] { labels_from(label_line("v", 0, 0, 181, 0)); }), "yaw 181"));
    CHECK_NOTHROW(labels_from(label_line("v", 0, 0, -180, 90)));
}

TEST_CASE("malformed records") {
    CHECK(code_of([] { labels_from("not json\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { labels_from(R"({"video":"v","frame":0,"viewer":0,"yaw":0})"
                                   "\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { labels_from(R"({"video":"v","frame":0.5,"viewer":0,"yaw":0,"pitch":0})"
                                   "\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { labels_from(""); }) == ErrorCode::Validation);
    CHECK(code_of([&] { labels_from(label_line("v", 0, 0, 0, 0) + label_line("w", 1, 0, 0, 0)); }) ==
          ErrorCode::Validation);
    CHECK(contains(error_of([&] { labels_from(label_line("v", 0, 0, 0, 0) + label_line("v", 0, 0, 0, 0)); }),
                   "duplicate label"));
}

TEST_CASE("prediction range is (0, 1]") {
    const std::string head = R"({"video":"p","fps":30})"
                             "\n";
    CHECK(contains(error_of([&] { predictions_from(head + R"({"video":"p","frame":0,"cvvp":0.0})"
                                                          "\n"); }),
                   "cvvp 0 outside (0, 1]"));
    CHECK_THROWS_AS(predictions_from(head + R"({"video":"p","frame":0,"cvvp":1.0000001})"
                                            "\n"),
                    Error);
    const auto ok = predictions_from(head + R"({"video":"p","frame":0,"cvvp":1.0})"
                                            "\n");
    CHECK(ok.values == std::vector<double>{1.0});
}

TEST_CASE("round trips are the identity") {
    testsupport::TempDir dir;

    LabelTraceSet labels;
    labels.video_id = "rt";
    labels.fps = 24;
    labels.viewer_ids = {2, 5};
    labels.frames = {{{0.1, 0.2}, {-179.5, 89.999}}, {{33.333333333333336, -12.25}, {180, -90}}};
    save_labels(labels, dir / "l.jsonl");
    const auto labels2 = load_labels(dir / "l.jsonl");
    CHECK(labels2.video_id == labels.video_id);
    CHECK(labels2.fps == labels.fps);
    CHECK(labels2.viewer_ids == labels.viewer_ids);
    for (long f = 0; f < 2; ++f)
        for (int j = 0; j < 2; ++j) {
            CHECK(labels2.frames[f][j].yaw() == labels.frames[f][j].yaw());
            CHECK(labels2.frames[f][j].pitch() == labels.frames[f][j].pitch());
        }

    Trajectory traj{"rt", 24, "human-label", {{1.0 / 3.0, 2.0 / 7.0}, {-90, 45}}};
    save_trajectory(traj, dir / "t.jsonl");
    const auto traj2 = load_trajectory(dir / "t.jsonl");
    CHECK(traj2.source == "human-label");
    CHECK(traj2.fps == 24);
    REQUIRE(traj2.directions.size() == 2);
    CHECK(traj2.directions[0].yaw() == traj.directions[0].yaw());
    CHECK(traj2.directions[0].pitch() == traj.directions[0].pitch());

    CvvpPredictions pred{"rt", 24, {0.1, 1.0, 1.0 / 6.0}};
    save_predictions(pred, dir / "p.jsonl");
    const auto pred2 = load_predictions(dir / "p.jsonl");
    CHECK(pred2.values == pred.values);

    ModeSchedule sched{"rt", {1, 1, 0, 0, 0}, 2, 4};
    save_schedule(sched, dir / "s.jsonl");
    CHECK(load_schedule(dir / "s.jsonl") == sched);

    std::vector<ViewerEvent> events = {{3, 0, EventKind::RequestManual}, {1, 4, EventKind::SteeringInput},
                                       {3, 4, EventKind::RequestAutoOptional}};
    save_events(events, dir / "e.jsonl");
    CHECK(load_events(dir / "e.jsonl") == events);

    std::vector<ViewerTrace> traces = {
        {1, {{0, ViewMode::AutoOptional, 0}, {1, ViewMode::AutoEnforced, 2}}},
        {4, {{0, ViewMode::Manual, 0}, {1, ViewMode::AutoEnforced, 0}}}};
    save_mode_traces(traces, dir / "m.jsonl");
    CHECK(load_mode_traces(dir / "m.jsonl") == traces);

    // Saving a second time writes the same bytes.
    save_predictions(pred2, dir / "p2.jsonl");
    std::ifstream a(dir / "p.jsonl"), b(dir / "p2.jsonl");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("schedule and events validation") {
    std::istringstream bad_value(R"({"video":"s","second":0,"value":2})"
                                 "\n");
    CHECK_THROWS_AS(parse_schedule(bad_value, "mem"), Error);
    std::istringstream gap(R"({"video":"s","second":0,"value":1})"
                           "\n"
                           R"({"video":"s","second":2,"value":1})"
                           "\n");
    CHECK(contains(error_of([&] { parse_schedule(gap, "mem"); }), "missing second 1"));
    std::istringstream bad_kind(R"({"viewer":0,"second":0,"kind":"jump"})"
                                "\n");
    CHECK_THROWS_AS(parse_events(bad_kind, "mem"), Error);
    std::istringstream negative(R"({"viewer":0,"second":-1,"kind":"steering"})"
                                "\n");
    CHECK_THROWS_AS(parse_events(negative, "mem"), Error);
}

TEST_CASE("missing files name the path") {
    const auto msg = error_of([] { load_trajectory("/nonexistent/dir/traj.jsonl"); });
    CHECK(contains(msg, "/nonexistent/dir/traj.jsonl"));
    CHECK(code_of([] { load_labels("/nonexistent/x"); }) == ErrorCode::Io);
}

TEST_CASE("bundled fixtures load") {
    const auto a = load_labels(testsupport::fixture("synth_a.labels.jsonl"));
    CHECK(a.viewer_count() == 6);
    CHECK(a.fps == 5);
    const auto t = load_trajectory(testsupport::fixture("synth_a.saliency.jsonl"));
    CHECK(static_cast<long>(t.directions.size()) == a.frame_count());
    const auto p = load_predictions(testsupport::fixture("synth_a.pred.jsonl"));
    CHECK(static_cast<long>(p.values.size()) == a.frame_count());
    CHECK(load_events(testsupport::fixture("demo.events.jsonl")).size() == 9);
}

}  // TEST_SUITE
