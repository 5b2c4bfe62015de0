#include "tripleview/stabilize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tripleview/error.hpp"

namespace tripleview {

std::vector<Segment> runs_of(const std::vector<std::uint8_t>& bits) {
    std::vector<Segment> out;
    for (int i = 0; i < static_cast<int>(bits.size()); ++i) {
        if (out.empty() || out.back().value != bits[i]) {
            out.push_back({i, 1, bits[i]});
        } else {
            ++out.back().length;
        }
    }
    return out;
}

std::vector<Segment> ModeSchedule::segments() const { return runs_of(values); }

bool satisfies_min_duration(const ModeSchedule& schedule) {
    const int total = schedule.seconds();
    const int clip = schedule.clip_len > 0 ? schedule.clip_len : std::max(total, 1);
    for (int start = 0; start < total; start += clip) {
        const int end = std::min(total, start + clip);
        std::vector<std::uint8_t> part(schedule.values.begin() + start, schedule.values.begin() + end);
        const auto runs = runs_of(part);
        if (end - start < schedule.t_min) {
            if (runs.size() > 1) return false;
            continue;
        }
        for (const auto& r : runs) {
            if (r.length < schedule.t_min) return false;
        }
    }
    return true;
}

void StabilizeParams::validate() const {
    if (!(th_cvvp > 0.0 && th_cvvp < 1.0)) fail(ErrorCode::InvalidArgument, "th_cvvp must lie in (0, 1)");
    if (t_min < 1) fail(ErrorCode::InvalidArgument, "t_min must be at least 1");
    if (clip_len < t_min) fail(ErrorCode::InvalidArgument, "clip_len must be at least t_min");
}

std::vector<double> per_second_average(std::span<const double> frame_values, int fps) {
    if (fps < 1) fail(ErrorCode::InvalidArgument, "fps must be at least 1");
    if (frame_values.empty()) fail(ErrorCode::InvalidArgument, "cannot average an empty series");
    std::vector<double> out;
    out.reserve((frame_values.size() + fps - 1) / fps);
    for (std::size_t begin = 0; begin < frame_values.size(); begin += fps) {
        const std::size_t end = std::min(frame_values.size(), begin + static_cast<std::size_t>(fps));
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) sum += frame_values[i];
        out.push_back(sum / static_cast<double>(end - begin));
    }
    return out;
}

double normalize_value(double x, double th_cvvp) {
    double y = x <= th_cvvp ? x * (0.5 / th_cvvp) : 0.5 + (x - th_cvvp) * (0.5 / (1.0 - th_cvvp));
    return std::clamp(y, 0.0, 1.0);
}

std::vector<double> normalize(std::span<const double> per_second, double th_cvvp) {
    if (!(th_cvvp > 0.0 && th_cvvp < 1.0)) fail(ErrorCode::InvalidArgument, "th_cvvp must lie in (0, 1)");
    std::vector<double> out;
    out.reserve(per_second.size());
    for (double x : per_second) out.push_back(normalize_value(x, th_cvvp));
    return out;
}

namespace {

__extension__ typedef unsigned __int128 u128;
constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    u128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > kSaturated) return kSaturated;
    }
    return static_cast<std::uint64_t>(r);
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

void check_series(std::span<const double> x) {
    if (x.empty()) fail(ErrorCode::InvalidArgument, "cannot stabilize an empty series");
    for (double v : x) {
        if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "normalized series contains a non-finite value");
    }
}

double tolerance(std::size_t seconds) { return kMseTieTolerance * std::max<double>(1.0, static_cast<double>(seconds)); }

// Schedule that holds one value for the whole clip; used when the clip is
// shorter than t_min.
StabilizeResult constant_schedule(std::span<const double> x, const StabilizeParams& params) {
    double cost0 = 0.0;
    double cost1 = 0.0;
    for (double v : x) {
        cost0 += v * v;
        cost1 += (1.0 - v) * (1.0 - v);
    }
    const std::uint8_t value = cost0 < cost1 - tolerance(x.size()) ? 0 : 1;
    StabilizeResult r;
    r.schedule.values.assign(x.size(), value);
    r.schedule.t_min = params.t_min;
    r.degenerate = true;
    r.mse = schedule_mse(r.schedule.values, x);
    return r;
}

}  // namespace

std::uint64_t candidate_count(int seconds, int t_min) {
    if (seconds < 1 || t_min < 1) fail(ErrorCode::InvalidArgument, "candidate_count needs positive T and t_min");
    std::uint64_t total = 0;
    for (int m = 1; m <= seconds / t_min; ++m) {
        const auto n = static_cast<std::uint64_t>(seconds - m * t_min + m - 1);
        total = saturating_add(total, binomial(n, static_cast<std::uint64_t>(m - 1)));
    }
    return saturating_add(total, total);
}

double schedule_mse(std::span<const std::uint8_t> bits, std::span<const double> normalized) {
    if (bits.size() != normalized.size() || bits.empty()) fail(ErrorCode::InvalidArgument, "schedule and series lengths differ");
    double sum = 0.0;
    for (std::size_t t = 0; t < bits.size(); ++t) {
        const double d = static_cast<double>(bits[t]) - normalized[t];
        sum += d * d;
    }
    return sum / static_cast<double>(bits.size());
}

StabilizeResult stabilize_bruteforce(std::span<const double> x, const StabilizeParams& params, std::uint64_t budget) {
    check_series(x);
    if (params.t_min < 1) fail(ErrorCode::InvalidArgument, "t_min must be at least 1");
    const int total = static_cast<int>(x.size());
    if (total < params.t_min) return constant_schedule(x, params);

    const std::uint64_t expected = candidate_count(total, params.t_min);
    if (expected > budget) {
        std::ostringstream msg;
        msg << "brute force over T=" << total << ", t_min=" << params.t_min << " needs " << expected
            << " candidates, budget is " << budget;
        fail(ErrorCode::BudgetExceeded, msg.str());
    }

    const double eps = tolerance(x.size());
    std::vector<int> lengths;
    std::vector<int> best_lengths;
    int best_v = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    std::uint64_t enumerated = 0;

    auto better = [&](double cost, int v) {
        if (best_v < 0 || cost < best_cost - eps) return true;
        if (cost > best_cost + eps) return false;
        if (lengths.size() != best_lengths.size()) return lengths.size() < best_lengths.size();
        if (v != best_v) return v == 1;
        return std::lexicographical_compare(best_lengths.begin(), best_lengths.end(), lengths.begin(), lengths.end());
    };

    // Every composition of `total` into parts >= t_min, for both starting
    // values. The cost is accumulated front to back along the recursion, in
    // the same order as schedule_mse.
    int start_v = 1;
    auto recurse = [&](auto& self, int pos, int value, double cost) -> void {
        if (pos == total) {
            ++enumerated;
            if (better(cost, start_v)) {
                best_cost = cost;
                best_v = start_v;
                best_lengths = lengths;
            }
            return;
        }
        double run = cost;
        for (int len = 1; pos + len <= total; ++len) {
            const double d = value - x[pos + len - 1];
            run += d * d;
            if (len < params.t_min) continue;
            const int rest = total - pos - len;
            if (rest != 0 && rest < params.t_min) continue;
            lengths.push_back(len);
            self(self, pos + len, value ^ 1, run);
            lengths.pop_back();
        }
    };
    for (int v : {1, 0}) {
        start_v = v;
        recurse(recurse, 0, v, 0.0);
    }

    StabilizeResult r;
    r.candidates = enumerated;
    r.schedule.t_min = params.t_min;
    int value = best_v;
    for (int len : best_lengths) {
        r.schedule.values.insert(r.schedule.values.end(), static_cast<std::size_t>(len), static_cast<std::uint8_t>(value));
        value ^= 1;
    }
    r.mse = schedule_mse(r.schedule.values, x);
    return r;
}

StabilizeResult stabilize_dp(std::span<const double> x, const StabilizeParams& params) {
    check_series(x);
    if (params.t_min < 1) fail(ErrorCode::InvalidArgument, "t_min must be at least 1");
    const int total = static_cast<int>(x.size());
    const int t_min = params.t_min;
    if (total < t_min) return constant_schedule(x, params);

    // prefix[v][t]: cost of holding value v over [0, t).
    std::vector<double> prefix[2];
    for (int v = 0; v < 2; ++v) {
        prefix[v].assign(total + 1, 0.0);
        for (int t = 0; t < total; ++t) {
            const double d = v - x[t];
            prefix[v][t + 1] = prefix[v][t] + d * d;
        }
    }
    auto run_cost = [&](int v, int begin, int end) { return prefix[v][end] - prefix[v][begin]; };

    // best[v][p]: minimum (cost, runs) to cover [p, T) starting with value v.
    struct Entry {
        double cost = std::numeric_limits<double>::infinity();
        int runs = 0;
        bool feasible = false;
    };
    const double eps = tolerance(x.size());
    auto better = [eps](double cost, int runs, const Entry& cur) {
        if (!cur.feasible || cost < cur.cost - eps) return true;
        if (cost > cur.cost + eps) return false;
        return runs < cur.runs;
    };

    std::vector<Entry> best[2];
    best[0].assign(total + 1, Entry{});
    best[1].assign(total + 1, Entry{});
    best[0][total] = best[1][total] = Entry{0.0, 0, true};
    for (int p = total - t_min; p >= 0; --p) {
        for (int v = 0; v < 2; ++v) {
            Entry e;
            for (int end = p + t_min; end <= total; ++end) {
                const Entry& next = best[v ^ 1][end];
                if (!next.feasible) continue;
                const double cost = run_cost(v, p, end) + next.cost;
                const int runs = 1 + next.runs;
                if (better(cost, runs, e)) e = Entry{cost, runs, true};
            }
            best[v][p] = e;
        }
    }

    // Fewer runs, then initial value 1.
    int v = 1;
    if (better(best[0][0].cost, best[0][0].runs, best[1][0])) v = 0;

    // Reconstruct with the latest feasible boundary at each step.
    StabilizeResult r;
    r.schedule.t_min = t_min;
    r.schedule.values.reserve(total);
    int p = 0;
    double target = best[v][0].cost;
    int runs_left = best[v][0].runs;
    while (p < total) {
        int chosen = -1;
        for (int end = total; end >= p + t_min; --end) {
            const Entry& next = best[v ^ 1][end];
            if (!next.feasible || next.runs != runs_left - 1) continue;
            if (std::abs(run_cost(v, p, end) + next.cost - target) <= eps) {
                chosen = end;
                break;
            }
        }
        if (chosen < 0) fail(ErrorCode::InvalidArgument, "stabilizer reconstruction failed");
        r.schedule.values.insert(r.schedule.values.end(), static_cast<std::size_t>(chosen - p), static_cast<std::uint8_t>(v));
        target = best[v ^ 1][chosen].cost;
        runs_left -= 1;
        p = chosen;
        v ^= 1;
    }
    r.mse = schedule_mse(r.schedule.values, x);
    return r;
}

VideoStabilizeResult stabilize_video(std::span<const double> x, const StabilizeParams& params, Solver solver,
                                     std::uint64_t budget) {
    params.validate();
    check_series(x);
    VideoStabilizeResult out;
    out.schedule.t_min = params.t_min;
    out.schedule.clip_len = params.clip_len;
    for (std::size_t start = 0; start < x.size(); start += static_cast<std::size_t>(params.clip_len)) {
        const std::size_t len = std::min(x.size() - start, static_cast<std::size_t>(params.clip_len));
        const auto clip = x.subspan(start, len);
        StabilizeResult r = solver == Solver::BruteForce ? stabilize_bruteforce(clip, params, budget)
                                                         : stabilize_dp(clip, params);
        out.candidates = saturating_add(out.candidates, r.candidates);
        out.schedule.values.insert(out.schedule.values.end(), r.schedule.values.begin(), r.schedule.values.end());
        out.clips.push_back(std::move(r));
    }
    return out;
}

ModeSchedule schedule_from_frames(std::span<const double> frame_cvvp, int fps, const StabilizeParams& params) {
    const auto per_second = per_second_average(frame_cvvp, fps);
    return stabilize_video(normalize(per_second, params.th_cvvp), params).schedule;
}

}  // namespace tripleview
