#include "teamlens/gaze_events.hpp"

#include <algorithm>
#include <cmath>

#include "teamlens/error.hpp"

namespace teamlens {

const char* event_kind_name(EventKind kind) {
    switch (kind) {
    case EventKind::fixation: return "fixation";
    case EventKind::saccade: return "saccade";
    case EventKind::other: return "other";
    }
    return "other";
}

EventKind parse_event_kind(int value) {
    if (value < 0 || value > 2) fail(ErrorCode::BadRecord, "event kind must be 0, 1, or 2");
    return static_cast<EventKind>(value);
}

void ClassifierParams::validate() const {
    if (smoothing_window_samples < 1 || smoothing_window_samples % 2 == 0) {
        fail(ErrorCode::BadRecord, "smoothing_window_samples must be a positive odd count");
    }
    if (smoothing_poly_order < 0 || smoothing_window_samples < smoothing_poly_order + 2) {
        fail(ErrorCode::BadRecord, "smoothing window must be >= poly order + 2");
    }
    if (min_fixation_ms <= 0) fail(ErrorCode::BadRecord, "min_fixation_ms must be > 0");
    if (max_saccade_ms <= 0) fail(ErrorCode::BadRecord, "max_saccade_ms must be > 0");
    if (max_gap_ms < 0) fail(ErrorCode::BadRecord, "max_gap_ms must be >= 0");
    if (velocity_threshold_mode == ThresholdMode::fixed && fixed_threshold_px_s <= 0) {
        fail(ErrorCode::BadRecord, "fixed_threshold_px_s must be > 0");
    }
    if (px_per_degree && *px_per_degree <= 0) fail(ErrorCode::BadRecord, "px_per_degree must be > 0");
}

Json classifier_params_to_json(const ClassifierParams& p) {
    Json doc = {
        {"smoothing_window_samples", p.smoothing_window_samples},
        {"smoothing_poly_order", p.smoothing_poly_order},
        {"velocity_threshold_mode", p.velocity_threshold_mode == ThresholdMode::fixed ? "fixed" : "adaptive"},
        {"fixed_threshold_px_s", p.fixed_threshold_px_s},
        {"adaptive_k", p.adaptive_k},
        {"min_fixation_ms", p.min_fixation_ms},
        {"max_saccade_ms", p.max_saccade_ms},
        {"max_gap_ms", p.max_gap_ms},
    };
    if (p.px_per_degree) doc["px_per_degree"] = *p.px_per_degree;
    return doc;
}

ClassifierParams classifier_params_from_json(const Json& doc) {
    ClassifierParams p;
    if (doc.contains("smoothing_window_samples")) p.smoothing_window_samples = doc["smoothing_window_samples"].get<int>();
    if (doc.contains("smoothing_poly_order")) p.smoothing_poly_order = doc["smoothing_poly_order"].get<int>();
    if (doc.contains("velocity_threshold_mode")) {
        const std::string mode = doc["velocity_threshold_mode"].get<std::string>();
        if (mode == "fixed") p.velocity_threshold_mode = ThresholdMode::fixed;
        else if (mode == "adaptive") p.velocity_threshold_mode = ThresholdMode::adaptive;
        else fail(ErrorCode::BadRecord, "velocity_threshold_mode must be fixed or adaptive");
    }
    if (doc.contains("fixed_threshold_px_s")) p.fixed_threshold_px_s = doc["fixed_threshold_px_s"].get<double>();
    if (doc.contains("adaptive_k")) p.adaptive_k = doc["adaptive_k"].get<double>();
    if (doc.contains("min_fixation_ms")) p.min_fixation_ms = doc["min_fixation_ms"].get<double>();
    if (doc.contains("max_saccade_ms")) p.max_saccade_ms = doc["max_saccade_ms"].get<double>();
    if (doc.contains("max_gap_ms")) p.max_gap_ms = doc["max_gap_ms"].get<double>();
    if (doc.contains("px_per_degree") && !doc["px_per_degree"].is_null()) {
        p.px_per_degree = doc["px_per_degree"].get<double>();
    }
    p.validate();
    return p;
}

namespace {

// Maximal stretches of consecutive valid samples.
std::vector<std::pair<std::size_t, std::size_t>> valid_runs(const GazeTrack& track) {
    std::vector<std::pair<std::size_t, std::size_t>> runs; // [begin, end] inclusive
    const auto& s = track.samples;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!s[i].valid) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < s.size() && s[j + 1].valid) ++j;
        runs.emplace_back(i, j);
        i = j + 1;
    }
    return runs;
}

// Least-squares polynomial fit of (dt_j, v_j), evaluated at dt = 0.
// Normal equations solved by Gaussian elimination with partial pivoting.
double polyfit_at_center(const std::vector<double>& dts, const std::vector<double>& values,
                         int order) {
    const int n = order + 1;
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t k = 0; k < dts.size(); ++k) {
        std::vector<double> powers(2 * n - 1);
        powers[0] = 1.0;
        for (int p = 1; p < 2 * n - 1; ++p) powers[p] = powers[p - 1] * dts[k];
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) a[r][c] += powers[r + c];
            a[r][n] += powers[r] * values[k];
        }
    }
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        if (std::fabs(a[col][col]) < 1e-30) return values.empty() ? 0.0 : values[0];
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a[r][col] / a[col][col];
            for (int c = col; c <= n; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    return a[0][n] / a[0][0]; // constant term = value at dt 0
}

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double hi = values[mid];
    if (values.size() % 2 == 1) return hi;
    std::nth_element(values.begin(), values.begin() + mid - 1, values.begin() + mid);
    return 0.5 * (values[mid - 1] + hi);
}

} // namespace

GazeTrack smooth_gaze(const GazeTrack& track, const ClassifierParams& params) {
    params.validate();
    if (static_cast<int>(track.valid_count()) < params.smoothing_window_samples) {
        fail(ErrorCode::TooFewSamples,
             "smoothing needs >= " + std::to_string(params.smoothing_window_samples) +
                 " valid samples, track has " + std::to_string(track.valid_count()));
    }

    GazeTrack out = track;
    const int window = params.smoothing_window_samples;
    const int order = params.smoothing_poly_order;
    const int half = window / 2;

    for (const auto& [begin, end] : valid_runs(track)) {
        const int run_len = static_cast<int>(end - begin + 1);
        if (run_len < order + 2) continue; // too short to fit; pass through
        const int w = std::min(window, run_len);
        for (std::size_t i = begin; i <= end; ++i) {
            // Window of w samples nearest i, clamped to the run.
            std::size_t lo = (i >= begin + half) ? i - half : begin;
            if (lo + w - 1 > end) lo = end - w + 1;
            if (lo < begin) lo = begin;

            std::vector<double> dts(w), xs(w), ys(w);
            for (int k = 0; k < w; ++k) {
                const auto& s = track.samples[lo + k];
                // integer difference first: exact under time shifts
                dts[k] = ns_to_sec(s.t_ns - track.samples[i].t_ns);
                xs[k] = s.x;
                ys[k] = s.y;
            }
            out.samples[i].x = polyfit_at_center(dts, xs, order);
            out.samples[i].y = polyfit_at_center(dts, ys, order);
        }
    }
    return out;
}

std::vector<std::optional<double>> compute_velocity(const GazeTrack& track,
                                                    std::optional<double> px_per_degree) {
    if (track.valid_count() < 2) {
        fail(ErrorCode::TooFewSamples, "velocity needs >= 2 valid samples");
    }
    const double scale = px_per_degree ? 1.0 / *px_per_degree : 1.0;
    std::vector<std::optional<double>> speeds(track.samples.size());

    for (const auto& [begin, end] : valid_runs(track)) {
        if (begin == end) continue; // isolated sample: no derivative
        for (std::size_t i = begin; i <= end; ++i) {
            const std::size_t prev = (i == begin) ? i : i - 1;
            const std::size_t next = (i == end) ? i : i + 1;
            const auto& a = track.samples[prev];
            const auto& b = track.samples[next];
            const double dt = ns_to_sec(b.t_ns - a.t_ns);
            if (dt <= 0) continue;
            const double vx = (b.x - a.x) / dt;
            const double vy = (b.y - a.y) / dt;
            speeds[i] = std::hypot(vx, vy) * scale;
        }
    }
    return speeds;
}

double velocity_threshold(const std::vector<std::optional<double>>& speeds,
                          const ClassifierParams& params) {
    if (params.velocity_threshold_mode == ThresholdMode::fixed) {
        return params.fixed_threshold_px_s;
    }
    std::vector<double> present;
    present.reserve(speeds.size());
    for (const auto& s : speeds) {
        if (s) present.push_back(*s);
    }
    const double med = median_of(present);
    std::vector<double> dev;
    dev.reserve(present.size());
    for (double v : present) dev.push_back(std::fabs(v - med));
    // floor keeps noise-free tracks (median = MAD = 0) from thresholding at
    // the level of numerical fit residue
    return std::max(med + params.adaptive_k * median_of(std::move(dev)), 1e-6);
}

namespace {

enum class SampleClass { gap, below, above };

struct Segment {
    std::size_t begin = 0; // sample indices, inclusive
    std::size_t end = 0;
    EventKind kind = EventKind::other;
};

std::pair<double, double> raw_mean_position(const GazeTrack& track, const Segment& seg) {
    double sx = 0, sy = 0;
    int n = 0;
    for (std::size_t i = seg.begin; i <= seg.end; ++i) {
        if (!track.samples[i].valid) continue;
        sx += track.samples[i].x;
        sy += track.samples[i].y;
        ++n;
    }
    if (n == 0) return {0.0, 0.0};
    return {sx / n, sy / n};
}

double segment_span_ms(const GazeTrack& track, const Segment& seg) {
    return ns_to_ms(track.samples[seg.end].t_ns - track.samples[seg.begin].t_ns);
}

} // namespace

EventTimeline classify_events(const GazeTrack& track, const ClassifierParams& params) {
    params.validate();
    const std::size_t valid = track.valid_count();
    if (valid == 0) fail(ErrorCode::AllInvalid, "track has no valid samples");
    if (valid < 2) fail(ErrorCode::TooFewSamples, "classification needs >= 2 valid samples");

    const GazeTrack smoothed =
        static_cast<int>(valid) >= params.smoothing_window_samples ? smooth_gaze(track, params)
                                                                   : track;
    const auto speeds = compute_velocity(smoothed);
    const double threshold = velocity_threshold(speeds, params);

    // 1. Per-sample class, then contiguous runs become candidate segments.
    const std::size_t n = track.samples.size();
    std::vector<SampleClass> cls(n, SampleClass::gap);
    for (std::size_t i = 0; i < n; ++i) {
        if (!track.samples[i].valid || !speeds[i]) continue;
        cls[i] = (*speeds[i] <= threshold) ? SampleClass::below : SampleClass::above;
    }

    std::vector<Segment> segments;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && cls[j + 1] == cls[i]) ++j;
        EventKind kind = EventKind::other;
        if (cls[i] == SampleClass::below) kind = EventKind::fixation;
        else if (cls[i] == SampleClass::above) kind = EventKind::saccade;
        segments.push_back({i, j, kind});
        i = j + 1;
    }

    // 2. Duration rules.
    for (auto& seg : segments) {
        const double span = segment_span_ms(track, seg);
        if (seg.kind == EventKind::fixation && span < params.min_fixation_ms) {
            seg.kind = EventKind::other;
        } else if (seg.kind == EventKind::saccade && span > params.max_saccade_ms) {
            seg.kind = EventKind::other;
        }
    }

    // 3. Merge nearby fixations that stayed on the same spot.
    const double radius = params.merge_radius_px();
    for (std::size_t i = 0; i < segments.size();) {
        if (segments[i].kind != EventKind::fixation) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < segments.size() && segments[j].kind != EventKind::fixation) ++j;
        if (j >= segments.size()) break;
        const double gap_ms =
            ns_to_ms(track.samples[segments[j].begin].t_ns - track.samples[segments[i].end].t_ns);
        const auto [ax, ay] = raw_mean_position(track, segments[i]);
        const auto [bx, by] = raw_mean_position(track, segments[j]);
        if (gap_ms <= params.max_gap_ms && std::hypot(bx - ax, by - ay) <= radius) {
            segments[i].end = segments[j].end;
            segments.erase(segments.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                           segments.begin() + static_cast<std::ptrdiff_t>(j) + 1);
            // stay at i: the merged fixation may chain with the next one
        } else {
            i = j;
        }
    }

    // 4. Coalesce adjacent segments that ended up with the same kind.
    std::vector<Segment> merged;
    for (const auto& seg : segments) {
        if (!merged.empty() && merged.back().kind == seg.kind) {
            merged.back().end = seg.end;
        } else {
            merged.push_back(seg);
        }
    }

    // 5. Events with midpoint boundaries; the family tiles [t0, t_last + 1).
    EventTimeline timeline;
    timeline.wearer_id = track.wearer_id;
    timeline.params_used = params;
    for (std::size_t k = 0; k < merged.size(); ++k) {
        const auto& seg = merged[k];
        EyeMovementEvent ev;
        ev.kind = seg.kind;
        ev.start_ns = (k == 0) ? track.samples.front().t_ns
                               : mid_ns(track.samples[merged[k - 1].end].t_ns,
                                        track.samples[seg.begin].t_ns);
        ev.end_ns = (k + 1 == merged.size()) ? track.samples.back().t_ns + 1
                                             : mid_ns(track.samples[seg.end].t_ns,
                                                      track.samples[merged[k + 1].begin].t_ns);
        double peak = 0.0;
        int n_valid = 0;
        for (std::size_t i = seg.begin; i <= seg.end; ++i) {
            if (speeds[i]) peak = std::max(peak, *speeds[i]);
            if (track.samples[i].valid) ++n_valid;
        }
        ev.peak_velocity = peak;
        if (n_valid > 0) ev.mean_position = raw_mean_position(track, seg);
        timeline.events.push_back(ev);
    }
    return timeline;
}

std::vector<EyeMovementEvent> fixations_of(const EventTimeline& timeline) {
    std::vector<EyeMovementEvent> out;
    for (const auto& ev : timeline.events) {
        if (ev.kind == EventKind::fixation) out.push_back(ev);
    }
    return out;
}

std::vector<Json> timeline_to_jsonl(const EventTimeline& timeline) {
    std::vector<Json> records;
    records.reserve(timeline.events.size());
    for (const auto& ev : timeline.events) {
        Json rec = {
            {"start_ns", ev.start_ns},
            {"end_ns", ev.end_ns},
            {"kind", static_cast<int>(ev.kind)},
            {"peak_velocity", ev.peak_velocity},
            {"mean_x", ev.mean_position ? Json(ev.mean_position->first) : Json(nullptr)},
            {"mean_y", ev.mean_position ? Json(ev.mean_position->second) : Json(nullptr)},
        };
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<EyeMovementEvent> timeline_events_from_jsonl(const std::vector<Json>& records) {
    std::vector<EyeMovementEvent> events;
    for (const auto& rec : records) {
        EyeMovementEvent ev;
        ev.start_ns = rec.at("start_ns").get<TimeNs>();
        ev.end_ns = rec.at("end_ns").get<TimeNs>();
        ev.kind = parse_event_kind(rec.at("kind").get<int>());
        ev.peak_velocity = rec.at("peak_velocity").get<double>();
        if (!rec.at("mean_x").is_null() && !rec.at("mean_y").is_null()) {
            ev.mean_position = {rec.at("mean_x").get<double>(), rec.at("mean_y").get<double>()};
        }
        events.push_back(ev);
    }
    return events;
}

} // namespace teamlens
