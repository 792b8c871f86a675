#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "teamlens/gaze.hpp"
#include "teamlens/jsonl.hpp"
#include "teamlens/time_ns.hpp"

namespace teamlens {

enum class EventKind : int { other = 0, fixation = 1, saccade = 2 };

const char* event_kind_name(EventKind kind);
EventKind parse_event_kind(int value);

// One eye-movement event. Intervals are half-open [start_ns, end_ns);
// consecutive events tile the track, with boundaries at inter-sample
// midpoints and the final end one tick past the last sample.
struct EyeMovementEvent {
    TimeNs start_ns = 0;
    TimeNs end_ns = 0;
    EventKind kind = EventKind::other;
    double peak_velocity = 0.0; // px/s
    std::optional<std::pair<double, double>> mean_position; // over valid samples

    bool contains(TimeNs t) const { return t >= start_ns && t < end_ns; }
    double duration_s() const { return ns_to_sec(end_ns - start_ns); }
};

enum class ThresholdMode { fixed, adaptive };

struct ClassifierParams {
    int smoothing_window_samples = 7; // odd, >= poly order + 2
    int smoothing_poly_order = 2;
    ThresholdMode velocity_threshold_mode = ThresholdMode::adaptive;
    double fixed_threshold_px_s = 300.0;
    double adaptive_k = 5.0; // threshold = median(speed) + k * MAD(speed)
    double min_fixation_ms = 100.0;
    double max_saccade_ms = 200.0;
    double max_gap_ms = 75.0; // fixation merge gap
    std::optional<double> px_per_degree; // calibration; merge radius is 1 deg, else 30 px

    void validate() const;
    double merge_radius_px() const { return px_per_degree ? *px_per_degree : 30.0; }
};

Json classifier_params_to_json(const ClassifierParams& params);
ClassifierParams classifier_params_from_json(const Json& doc);

struct EventTimeline {
    std::string wearer_id;
    std::vector<EyeMovementEvent> events; // sorted, non-overlapping
    ClassifierParams params_used;
};

// Savitzky-Golay style smoothing: per-sample least-squares polynomial fit over
// a window of neighbouring samples, evaluated at the sample's own timestamp.
// Works on non-uniform timestamps. Invalid samples break runs and are passed
// through untouched; runs shorter than poly order + 2 are copied as-is.
// Requires at least smoothing_window_samples valid samples in total.
GazeTrack smooth_gaze(const GazeTrack& track, const ClassifierParams& params);

// Per-sample speed: central difference on run interiors, one-sided at run
// edges, absent on invalid samples and single-sample runs. px/s by default,
// deg/s when px_per_degree given.
std::vector<std::optional<double>> compute_velocity(const GazeTrack& track,
                                                    std::optional<double> px_per_degree = std::nullopt);

// Velocity threshold the classifier would use for these speeds.
double velocity_threshold(const std::vector<std::optional<double>>& speeds,
                          const ClassifierParams& params);

// Velocity-threshold event classification. Samples at or below the threshold
// form fixation candidates, samples above form saccade candidates, invalid
// stretches become "other". Fixation candidates shorter than min_fixation_ms
// are relabeled other; saccade candidates longer than max_saccade_ms are
// relabeled other; fixations separated by <= max_gap_ms with mean positions
// within the merge radius are merged. Every sample ends up in exactly one
// event.
EventTimeline classify_events(const GazeTrack& track, const ClassifierParams& params);

std::vector<EyeMovementEvent> fixations_of(const EventTimeline& timeline);

std::vector<Json> timeline_to_jsonl(const EventTimeline& timeline);
std::vector<EyeMovementEvent> timeline_events_from_jsonl(const std::vector<Json>& records);

} // namespace teamlens
