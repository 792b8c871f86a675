#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "teamlens/time_ns.hpp"

namespace teamlens {

struct StreamMeta {
    int width = 1280;           // W, px
    int height = 960;           // H, px
    double nominal_rate_hz = 10.0;
    int frame_count = 0;        // T, filled from the frame-indexed streams

    bool operator==(const StreamMeta&) const = default;
};

struct GazeSample {
    TimeNs t_ns = 0; // session clock
    double x = 0.0;
    double y = 0.0;
    std::optional<double> confidence;
    bool valid = true; // false when (x, y) fell outside [0,W]x[0,H]; sample kept
    int source_line = 0;

    bool operator==(const GazeSample&) const = default;
};

struct GazeTrack {
    std::string wearer_id;
    std::vector<GazeSample> samples; // t_ns strictly increasing
    StreamMeta meta;

    std::size_t valid_count() const;
    TimeNs span_ns() const; // last t - first t, 0 when < 2 samples
};

// Accepts JSON Lines {"t_ns","x","y","conf"?} or CSV with header t_ns,x,y,conf.
// Timestamps in the file are device clock; clock_offset_ns shifts them onto
// the session clock. Samples are sorted; an exact duplicate timestamp after
// the sort is NonMonotonicTimestamps (the message names the offending line).
// Out-of-range positions are flagged invalid, never dropped.
GazeTrack load_gaze_track(const std::filesystem::path& path, const StreamMeta& meta,
                          TimeNs clock_offset_ns, const std::string& wearer_id = "");

// Nearest-in-time valid sample for each frame instant, or nullopt when the
// nearest one is farther than tolerance_ns. Ties pick the earlier sample.
struct FramedGaze {
    std::vector<TimeNs> frame_times;
    std::vector<std::optional<std::size_t>> sample_index; // into track.samples

    bool has(std::size_t frame) const {
        return frame < sample_index.size() && sample_index[frame].has_value();
    }
};

FramedGaze align_to_frames(const GazeTrack& track, const std::vector<TimeNs>& frame_times,
                           TimeNs tolerance_ns);

} // namespace teamlens
