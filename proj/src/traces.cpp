#include "tripleview/traces.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tripleview/error.hpp"

namespace tripleview {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct Record {
    int line = 0;
    json value;
};

struct Context {
    Context(const std::string& source_, int line_, std::string video_ = {}, std::optional<long> frame_ = {})
        : source(source_), line(line_), video(std::move(video_)), frame(frame_) {}

    const std::string& source;
    int line = 0;
    std::string video;
    std::optional<long> frame;

    [[noreturn]] void raise(ErrorCode code, const std::string& what) const {
        std::ostringstream msg;
        msg << source;
        if (line > 0) msg << ":" << line;
        msg << ":";
        if (!video.empty()) msg << " video '" << video << "'";
        if (frame) msg << " frame " << *frame;
        msg << (video.empty() && !frame ? " " : ": ") << what;
        throw Error(code, msg.str());
    }
};

std::vector<Record> read_jsonl(std::istream& in, const std::string& source) {
    std::vector<Record> out;
    std::string text;
    int line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded() || !value.is_object()) {
            Context{source, line}.raise(ErrorCode::Parse, "not a JSON object");
        }
        out.push_back({line, std::move(value)});
    }
    if (in.bad()) fail(ErrorCode::Io, "read error on " + source);
    return out;
}

const json& field(const json& obj, const char* key, const Context& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) ctx.raise(ErrorCode::Parse, std::string("missing key '") + key + "'");
    return *it;
}

long get_int(const json& obj, const char* key, const Context& ctx) {
    const json& v = field(obj, key, ctx);
    if (!v.is_number_integer()) ctx.raise(ErrorCode::Parse, std::string("'") + key + "' must be an integer");
    return v.get<long>();
}

double get_number(const json& obj, const char* key, const Context& ctx) {
    const json& v = field(obj, key, ctx);
    if (!v.is_number()) ctx.raise(ErrorCode::Parse, std::string("'") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) ctx.raise(ErrorCode::Validation, std::string("'") + key + "' must be finite");
    return d;
}

std::string get_string(const json& obj, const char* key, const Context& ctx) {
    const json& v = field(obj, key, ctx);
    if (!v.is_string()) ctx.raise(ErrorCode::Parse, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

// Header: an optional first record without the per-record key.
struct Header {
    std::string video;
    bool has_video = false;
    int fps = kDefaultFps;
    std::string source;
    int t_min = 1;
    int clip_len = 0;
};

std::size_t take_header(std::vector<Record>& records, const char* record_key, const std::string& source, Header& h,
                        int default_fps = kDefaultFps) {
    if (default_fps < 1) fail(ErrorCode::InvalidArgument, "default fps must be at least 1");
    h.fps = default_fps;
    if (records.empty() || records.front().value.contains(record_key)) return 0;
    const Record& r = records.front();
    Context ctx{source, r.line};
    if (r.value.contains("video")) {
        h.video = get_string(r.value, "video", ctx);
        h.has_video = true;
    }
    if (r.value.contains("fps")) {
        const long fps = get_int(r.value, "fps", ctx);
        if (fps < 1) ctx.raise(ErrorCode::Validation, "fps must be at least 1");
        h.fps = static_cast<int>(fps);
    }
    if (r.value.contains("source")) h.source = get_string(r.value, "source", ctx);
    if (r.value.contains("t_min")) h.t_min = static_cast<int>(get_int(r.value, "t_min", ctx));
    if (r.value.contains("clip_len")) h.clip_len = static_cast<int>(get_int(r.value, "clip_len", ctx));
    return 1;
}

// Checks the record's video against the file's and fills ctx.video.
void bind_video(const json& obj, Header& h, Context& ctx) {
    const std::string video = get_string(obj, "video", ctx);
    if (!h.has_video) {
        h.video = video;
        h.has_video = true;
    }
    ctx.video = h.video;
    if (video != h.video) ctx.raise(ErrorCode::Validation, "record belongs to video '" + video + "'");
}

ViewingDirection read_direction(const json& obj, const Context& ctx) {
    const double yaw = get_number(obj, "yaw", ctx);
    const double pitch = get_number(obj, "pitch", ctx);
    if (yaw < -180.0 || yaw > 180.0) {
        std::ostringstream msg;
        msg << "yaw " << yaw << " outside [-180, 180]";
        ctx.raise(ErrorCode::Validation, msg.str());
    }
    if (pitch < -90.0 || pitch > 90.0) {
        std::ostringstream msg;
        msg << "pitch " << pitch << " outside [-90, 90]";
        ctx.raise(ErrorCode::Validation, msg.str());
    }
    return {yaw, pitch};
}

long read_index(const json& obj, const char* key, Context& ctx) {
    const long v = get_int(obj, key, ctx);
    if (v < 0) ctx.raise(ErrorCode::Validation, std::string("'") + key + "' must be non-negative");
    return v;
}

// Dense per-frame values; gaps are errors unless fill_gaps holds the last value.
template <typename T>
std::vector<T> densify(std::map<long, std::pair<T, int>>& sparse, bool fill_gaps, const Header& h,
                       const std::string& source) {
    std::vector<T> out;
    long expected = 0;
    for (auto& [frame, entry] : sparse) {
        if (frame != expected) {
            if (!fill_gaps || expected == 0) {
                Context ctx{source, entry.second, h.video, expected};
                ctx.raise(ErrorCode::Validation, "missing frame " + std::to_string(expected) + " (frames must be contiguous from 0)");
            }
            while (expected < frame) {
                out.push_back(out.back());
                ++expected;
            }
        }
        out.push_back(std::move(entry.first));
        ++expected;
    }
    return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    return in;
}

void finish(std::ostream& out, const std::string& what) {
    out.flush();
    if (!out) fail(ErrorCode::Io, "failed writing " + what);
}

}  // namespace

LabelTraceSet parse_labels(std::istream& in, const std::string& source, const LoadOptions& options) {
    auto records = read_jsonl(in, source);
    Header h;
    const std::size_t first = take_header(records, "frame", source, h, options.default_fps);

    std::map<long, std::map<int, ViewingDirection>> frames;
    std::map<long, int> last_line;
    std::set<int> viewers;
    for (std::size_t i = first; i < records.size(); ++i) {
        const auto& [line, obj] = records[i];
        Context ctx{source, line};
        bind_video(obj, h, ctx);
        const long frame = read_index(obj, "frame", ctx);
        ctx.frame = frame;
        const int viewer = static_cast<int>(read_index(obj, "viewer", ctx));
        const ViewingDirection d = read_direction(obj, ctx);
        if (!frames[frame].emplace(viewer, d).second) {
            ctx.raise(ErrorCode::Validation, "duplicate label for viewer " + std::to_string(viewer));
        }
        viewers.insert(viewer);
        last_line[frame] = line;
    }
    if (frames.empty()) Context{source, 0, h.video}.raise(ErrorCode::Validation, "no label records");

    LabelTraceSet out;
    out.video_id = h.video;
    out.fps = h.fps;
    out.viewer_ids.assign(viewers.begin(), viewers.end());

    std::map<long, std::pair<std::vector<ViewingDirection>, int>> dense_frames;
    const std::vector<ViewingDirection>* previous = nullptr;
    long expected = 0;
    for (auto& [frame, by_viewer] : frames) {
        const int line = last_line[frame];
        if (frame != expected && !options.fill_gaps) {
            Context{source, line, h.video, expected}.raise(
                ErrorCode::Validation, "missing frame " + std::to_string(expected) + " (frames must be contiguous from 0)");
        }
        std::vector<ViewingDirection> row;
        row.reserve(out.viewer_ids.size());
        for (int viewer : out.viewer_ids) {
            auto it = by_viewer.find(viewer);
            if (it != by_viewer.end()) {
                row.push_back(it->second);
            } else if (options.fill_gaps && previous != nullptr) {
                row.push_back((*previous)[row.size()]);
            } else {
                std::ostringstream msg;
                msg << "incomplete viewer coverage at frame " << frame << " (" << by_viewer.size() << " of "
                    << out.viewer_ids.size() << " viewers; viewer " << viewer << " missing)";
                Context{source, line, h.video, frame}.raise(ErrorCode::Validation, msg.str());
            }
        }
        auto& slot = dense_frames[frame];
        slot = {std::move(row), line};
        previous = &slot.first;
        expected = frame + 1;
    }
    out.frames = densify(dense_frames, options.fill_gaps, h, source);
    return out;
}

Trajectory parse_trajectory(std::istream& in, const std::string& source, const LoadOptions& options) {
    auto records = read_jsonl(in, source);
    Header h;
    const std::size_t first = take_header(records, "frame", source, h, options.default_fps);
    std::map<long, std::pair<ViewingDirection, int>> sparse;
    for (std::size_t i = first; i < records.size(); ++i) {
        const auto& [line, obj] = records[i];
        Context ctx{source, line};
        bind_video(obj, h, ctx);
        const long frame = read_index(obj, "frame", ctx);
        ctx.frame = frame;
        if (!sparse.emplace(frame, std::pair{read_direction(obj, ctx), line}).second) {
            ctx.raise(ErrorCode::Validation, "duplicate trajectory record");
        }
    }
    if (sparse.empty()) Context{source, 0, h.video}.raise(ErrorCode::Validation, "no trajectory records");
    Trajectory out;
    out.video_id = h.video;
    out.fps = h.fps;
    if (!h.source.empty()) out.source = h.source;
    out.directions = densify(sparse, options.fill_gaps, h, source);
    return out;
}

CvvpPredictions parse_predictions(std::istream& in, const std::string& source, const LoadOptions& options) {
    auto records = read_jsonl(in, source);
    Header h;
    const std::size_t first = take_header(records, "frame", source, h, options.default_fps);
    std::map<long, std::pair<double, int>> sparse;
    for (std::size_t i = first; i < records.size(); ++i) {
        const auto& [line, obj] = records[i];
        Context ctx{source, line};
        bind_video(obj, h, ctx);
        const long frame = read_index(obj, "frame", ctx);
        ctx.frame = frame;
        const double cvvp = get_number(obj, "cvvp", ctx);
        if (!(cvvp > 0.0 && cvvp <= 1.0)) {
            std::ostringstream msg;
            msg << "cvvp " << cvvp << " outside (0, 1]";
            ctx.raise(ErrorCode::Validation, msg.str());
        }
        if (!sparse.emplace(frame, std::pair{cvvp, line}).second) {
            ctx.raise(ErrorCode::Validation, "duplicate prediction record");
        }
    }
    if (sparse.empty()) Context{source, 0, h.video}.raise(ErrorCode::Validation, "no prediction records");
    CvvpPredictions out;
    out.video_id = h.video;
    out.fps = h.fps;
    out.values = densify(sparse, false, h, source);
    return out;
}

ModeSchedule parse_schedule(std::istream& in, const std::string& source) {
    auto records = read_jsonl(in, source);
    Header h;
    const std::size_t first = take_header(records, "second", source, h);
    std::map<long, std::pair<std::uint8_t, int>> sparse;
    for (std::size_t i = first; i < records.size(); ++i) {
        const auto& [line, obj] = records[i];
        Context ctx{source, line};
        bind_video(obj, h, ctx);
        const long second = read_index(obj, "second", ctx);
        const long value = get_int(obj, "value", ctx);
        if (value != 0 && value != 1) ctx.raise(ErrorCode::Validation, "schedule value must be 0 or 1");
        if (!sparse.emplace(second, std::pair{static_cast<std::uint8_t>(value), line}).second) {
            ctx.raise(ErrorCode::Validation, "duplicate second " + std::to_string(second));
        }
    }
    if (sparse.empty()) Context{source, 0, h.video}.raise(ErrorCode::Validation, "no schedule records");
    ModeSchedule out;
    out.video_id = h.video;
    out.t_min = h.t_min;
    out.clip_len = h.clip_len;
    long expected = 0;
    for (const auto& [second, entry] : sparse) {
        if (second != expected) {
            Context{source, entry.second, h.video}.raise(ErrorCode::Validation,
                                                          "missing second " + std::to_string(expected));
        }
        out.values.push_back(entry.first);
        ++expected;
    }
    return out;
}

std::vector<ViewerEvent> parse_events(std::istream& in, const std::string& source) {
    std::vector<ViewerEvent> out;
    for (const auto& [line, obj] : read_jsonl(in, source)) {
        Context ctx{source, line};
        ViewerEvent e;
        e.viewer = static_cast<int>(read_index(obj, "viewer", ctx));
        e.second = static_cast<int>(read_index(obj, "second", ctx));
        try {
            e.kind = parse_event_kind(get_string(obj, "kind", ctx));
        } catch (const Error& err) {
            ctx.raise(ErrorCode::Parse, err.what());
        }
        out.push_back(e);
    }
    return out;
}

LabelTraceSet load_labels(const std::filesystem::path& path, const LoadOptions& options) {
    auto in = open_in(path);
    return parse_labels(in, path.string(), options);
}

Trajectory load_trajectory(const std::filesystem::path& path, const LoadOptions& options) {
    auto in = open_in(path);
    return parse_trajectory(in, path.string(), options);
}

CvvpPredictions load_predictions(const std::filesystem::path& path, const LoadOptions& options) {
    auto in = open_in(path);
    return parse_predictions(in, path.string(), options);
}

ModeSchedule load_schedule(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_schedule(in, path.string());
}

std::vector<ViewerEvent> load_events(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_events(in, path.string());
}

std::vector<ViewerTrace> load_mode_traces(const std::filesystem::path& path) {
    auto in = open_in(path);
    const std::string source = path.string();
    std::map<int, ViewerTrace> traces;
    for (const auto& [line, obj] : read_jsonl(in, source)) {
        Context ctx{source, line};
        const int viewer = static_cast<int>(read_index(obj, "viewer", ctx));
        ModeSample s;
        s.second = static_cast<int>(read_index(obj, "second", ctx));
        try {
            s.mode = parse_view_mode(get_string(obj, "mode", ctx));
        } catch (const Error& err) {
            ctx.raise(ErrorCode::Parse, err.what());
        }
        if (obj.contains("suppressed")) s.suppressed = static_cast<int>(read_index(obj, "suppressed", ctx));
        auto& t = traces[viewer];
        t.viewer = viewer;
        if (s.second != static_cast<int>(t.samples.size())) {
            ctx.raise(ErrorCode::Validation, "mode trace seconds must be contiguous from 0 per viewer");
        }
        t.samples.push_back(s);
    }
    std::vector<ViewerTrace> out;
    for (auto& [viewer, t] : traces) out.push_back(std::move(t));
    return out;
}

void write_labels(const LabelTraceSet& labels, std::ostream& out) {
    out << ordered_json{{"video", labels.video_id}, {"fps", labels.fps}}.dump() << '\n';
    for (long f = 0; f < labels.frame_count(); ++f) {
        const auto row = labels.frame(f);
        for (std::size_t j = 0; j < row.size(); ++j) {
            out << ordered_json{{"video", labels.video_id},
                                {"frame", f},
                                {"viewer", labels.viewer_ids.at(j)},
                                {"yaw", row[j].yaw()},
                                {"pitch", row[j].pitch()}}
                       .dump()
                << '\n';
        }
    }
}

void write_trajectory(const Trajectory& trajectory, std::ostream& out) {
    out << ordered_json{{"video", trajectory.video_id}, {"fps", trajectory.fps}, {"source", trajectory.source}}.dump()
        << '\n';
    for (std::size_t f = 0; f < trajectory.directions.size(); ++f) {
        const auto& d = trajectory.directions[f];
        out << ordered_json{{"video", trajectory.video_id}, {"frame", f}, {"yaw", d.yaw()}, {"pitch", d.pitch()}}.dump()
            << '\n';
    }
}

void write_predictions(const CvvpPredictions& predictions, std::ostream& out) {
    out << ordered_json{{"video", predictions.video_id}, {"fps", predictions.fps}}.dump() << '\n';
    for (std::size_t f = 0; f < predictions.values.size(); ++f) {
        out << ordered_json{{"video", predictions.video_id}, {"frame", f}, {"cvvp", predictions.values[f]}}.dump()
            << '\n';
    }
}

void write_schedule(const ModeSchedule& schedule, std::ostream& out) {
    out << ordered_json{{"video", schedule.video_id}, {"t_min", schedule.t_min}, {"clip_len", schedule.clip_len}}.dump()
        << '\n';
    for (std::size_t s = 0; s < schedule.values.size(); ++s) {
        out << ordered_json{{"video", schedule.video_id}, {"second", s}, {"value", schedule.values[s]}}.dump() << '\n';
    }
}

void write_events(std::span<const ViewerEvent> events, std::ostream& out) {
    for (const auto& e : events) {
        out << ordered_json{{"viewer", e.viewer}, {"second", e.second}, {"kind", to_string(e.kind)}}.dump() << '\n';
    }
}

void write_mode_traces(std::span<const ViewerTrace> traces, std::ostream& out) {
    for (const auto& t : traces) {
        for (const auto& s : t.samples) {
            ordered_json rec{{"viewer", t.viewer}, {"second", s.second}, {"mode", to_string(s.mode)}};
            if (s.suppressed > 0) rec["suppressed"] = s.suppressed;
            out << rec.dump() << '\n';
        }
    }
}

void save_labels(const LabelTraceSet& labels, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_labels(labels, out);
    finish(out, path.string());
}

void save_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_trajectory(trajectory, out);
    finish(out, path.string());
}

void save_predictions(const CvvpPredictions& predictions, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_predictions(predictions, out);
    finish(out, path.string());
}

void save_schedule(const ModeSchedule& schedule, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_schedule(schedule, out);
    finish(out, path.string());
}

void save_events(std::span<const ViewerEvent> events, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_events(events, out);
    finish(out, path.string());
}

void save_mode_traces(std::span<const ViewerTrace> traces, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_mode_traces(traces, out);
    finish(out, path.string());
}

}  // namespace tripleview
