#include "tripleview/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tripleview/error.hpp"

namespace tripleview {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
    fail(ErrorCode::InvalidArgument,
         "config key '" + std::string(key) + "': '" + std::string(value) + "' is not " + expected);
}

double parse_double(std::string_view key, std::string_view value) {
    if (value == "inf" || value == "infinity") return std::numeric_limits<double>::infinity();
    double out = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size() || std::isnan(out)) {
        bad_value(key, value, "a number");
    }
    return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
    Int out{};
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) bad_value(key, value, "an integer");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    bad_value(key, value, "a boolean");
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::vector<std::string> RunConfig::keys() {
    return {"th_dist",        "th_cvvp",   "t_min",       "clip_len",          "fps",
            "grid_res",       "idle_timeout", "switch_prob", "seed",            "restore_on_release",
            "initial_mode",   "manual_miss_prob", "exclude_all_enforced", "fill_gaps", "threads",
            "candidate_budget"};
}

void RunConfig::set(std::string_view key, std::string_view raw) {
    const std::string_view value = trim(raw);
    if (key == "th_dist") th_dist = parse_double(key, value);
    else if (key == "th_cvvp") th_cvvp = parse_double(key, value);
    else if (key == "t_min") t_min = parse_int<int>(key, value);
    else if (key == "clip_len") clip_len = parse_int<int>(key, value);
    else if (key == "fps") fps = parse_int<int>(key, value);
    else if (key == "grid_res") grid_res = parse_double(key, value);
    else if (key == "idle_timeout") idle_timeout = parse_double(key, value);
    else if (key == "switch_prob") switch_prob = parse_double(key, value);
    else if (key == "seed") seed = parse_int<std::uint64_t>(key, value);
    else if (key == "restore_on_release") restore_on_release = parse_bool(key, value);
    else if (key == "initial_mode") initial_mode = parse_view_mode(value);
    else if (key == "manual_miss_prob") manual_miss_prob = parse_double(key, value);
    else if (key == "exclude_all_enforced") exclude_all_enforced = parse_bool(key, value);
    else if (key == "fill_gaps") fill_gaps = parse_bool(key, value);
    else if (key == "threads") threads = parse_int<unsigned>(key, value);
    else if (key == "candidate_budget") candidate_budget = parse_int<std::uint64_t>(key, value);
    else fail(ErrorCode::InvalidArgument, "unknown config key '" + std::string(key) + "'");
}

std::string RunConfig::get(std::string_view key) const {
    if (key == "th_dist") return fmt(th_dist);
    if (key == "th_cvvp") return fmt(th_cvvp);
    if (key == "t_min") return std::to_string(t_min);
    if (key == "clip_len") return std::to_string(clip_len);
    if (key == "fps") return std::to_string(fps);
    if (key == "grid_res") return fmt(grid_res);
    if (key == "idle_timeout") return fmt(idle_timeout);
    if (key == "switch_prob") return fmt(switch_prob);
    if (key == "seed") return std::to_string(seed);
    if (key == "restore_on_release") return restore_on_release ? "true" : "false";
    if (key == "initial_mode") return std::string(to_string(initial_mode));
    if (key == "manual_miss_prob") return fmt(manual_miss_prob);
    if (key == "exclude_all_enforced") return exclude_all_enforced ? "true" : "false";
    if (key == "fill_gaps") return fill_gaps ? "true" : "false";
    if (key == "threads") return std::to_string(threads);
    if (key == "candidate_budget") return std::to_string(candidate_budget);
    fail(ErrorCode::InvalidArgument, "unknown config key '" + std::string(key) + "'");
}

void RunConfig::validate() const {
    importance().validate();
    stabilize().validate();
    decision().validate();
    if (fps < 1) fail(ErrorCode::InvalidArgument, "fps must be at least 1");
    if (!(grid_res > 0.0) || !std::isfinite(grid_res)) fail(ErrorCode::InvalidArgument, "grid_res must be positive");
    BehaviorModel b;
    b.switch_prob = switch_prob;
    b.manual_miss_prob = manual_miss_prob;
    b.validate();
}

std::string RunConfig::serialize() const {
    std::string out;
    for (const auto& k : keys()) out += k + " = " + get(k) + "\n";
    return out;
}

void RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open config " + path.string());
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorCode::Parse, path.string() + ":" + std::to_string(number) + ": expected 'key = value'");
        }
        try {
            set(trim(view.substr(0, eq)), view.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
}

ImportanceParams RunConfig::importance() const { return ImportanceParams{th_dist}; }

StabilizeParams RunConfig::stabilize() const { return StabilizeParams{th_cvvp, t_min, clip_len}; }

DecisionConfig RunConfig::decision() const {
    DecisionConfig d;
    d.idle_timeout = idle_timeout;
    d.restore_on_release = restore_on_release;
    d.initial_mode = initial_mode;
    return d;
}

EvaluationConfig RunConfig::evaluation() const {
    EvaluationConfig e;
    e.simulation.importance = importance();
    e.simulation.decision = decision();
    e.simulation.behavior.switch_prob = switch_prob;
    e.simulation.behavior.manual_miss_prob = manual_miss_prob;
    e.simulation.seed = seed;
    e.stabilize = stabilize();
    e.grid_res = grid_res;
    e.exclude_all_enforced = exclude_all_enforced;
    e.threads = threads;
    return e;
}

}  // namespace tripleview
