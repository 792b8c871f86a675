#include "teamlens/gaze.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "teamlens/error.hpp"
#include "teamlens/jsonl.hpp"

namespace teamlens {

std::size_t GazeTrack::valid_count() const {
    std::size_t n = 0;
    for (const auto& s : samples) {
        if (s.valid) ++n;
    }
    return n;
}

TimeNs GazeTrack::span_ns() const {
    if (samples.size() < 2) return 0;
    return samples.back().t_ns - samples.front().t_ns;
}

namespace {

bool looks_like_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string first;
    while (std::getline(in, first)) {
        if (first.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    return first.rfind("t_ns", 0) == 0;
}

std::vector<GazeSample> parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::BadRecord, "cannot open " + path.string());
    std::vector<GazeSample> samples;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!header_seen) {
            if (line.rfind("t_ns", 0) != 0) {
                fail(ErrorCode::BadRecord,
                     path.string() + ":" + std::to_string(line_no) + ": expected header t_ns,x,y,conf");
            }
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() < 3) {
            fail(ErrorCode::BadRecord,
                 path.string() + ":" + std::to_string(line_no) + ": expected t_ns,x,y[,conf]");
        }
        GazeSample s;
        try {
            s.t_ns = std::stoll(cells[0]);
            s.x = std::stod(cells[1]);
            s.y = std::stod(cells[2]);
            if (cells.size() > 3 && !cells[3].empty()) s.confidence = std::stod(cells[3]);
        } catch (const std::exception&) {
            fail(ErrorCode::BadRecord,
                 path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
        s.source_line = line_no;
        samples.push_back(s);
    }
    return samples;
}

std::vector<GazeSample> parse_jsonl(const std::filesystem::path& path) {
    std::vector<GazeSample> samples;
    for (const auto& rec : read_jsonl(path)) {
        const std::string context = path.string() + ":" + std::to_string(rec.line);
        if (!rec.value.is_object()) fail(ErrorCode::BadRecord, context + ": expected an object");
        GazeSample s;
        s.t_ns = require_field(rec.value, "t_ns", context).get<TimeNs>();
        s.x = require_field(rec.value, "x", context).get<double>();
        s.y = require_field(rec.value, "y", context).get<double>();
        if (rec.value.contains("conf") && !rec.value["conf"].is_null()) {
            s.confidence = rec.value["conf"].get<double>();
        }
        s.source_line = rec.line;
        samples.push_back(s);
    }
    return samples;
}

} // namespace

GazeTrack load_gaze_track(const std::filesystem::path& path, const StreamMeta& meta,
                          TimeNs clock_offset_ns, const std::string& wearer_id) {
    GazeTrack track;
    track.wearer_id = wearer_id;
    track.meta = meta;
    track.samples = looks_like_csv(path) ? parse_csv(path) : parse_jsonl(path);

    if (track.samples.empty()) fail(ErrorCode::EmptyStream, path.string());

    for (auto& s : track.samples) {
        s.t_ns += clock_offset_ns;
        const bool in_range = std::isfinite(s.x) && std::isfinite(s.y) &&
                              s.x >= 0.0 && s.x <= meta.width &&
                              s.y >= 0.0 && s.y <= meta.height;
        s.valid = in_range;
    }

    std::stable_sort(track.samples.begin(), track.samples.end(),
                     [](const GazeSample& a, const GazeSample& b) { return a.t_ns < b.t_ns; });

    for (std::size_t i = 1; i < track.samples.size(); ++i) {
        if (track.samples[i].t_ns == track.samples[i - 1].t_ns) {
            fail(ErrorCode::NonMonotonicTimestamps,
                 path.string() + ":" + std::to_string(track.samples[i].source_line) +
                     ": duplicate timestamp " + std::to_string(track.samples[i].t_ns));
        }
    }
    return track;
}

FramedGaze align_to_frames(const GazeTrack& track, const std::vector<TimeNs>& frame_times,
                           TimeNs tolerance_ns) {
    FramedGaze framed;
    framed.frame_times = frame_times;
    framed.sample_index.assign(frame_times.size(), std::nullopt);

    std::vector<std::size_t> valid;
    valid.reserve(track.samples.size());
    for (std::size_t i = 0; i < track.samples.size(); ++i) {
        if (track.samples[i].valid) valid.push_back(i);
    }
    if (valid.empty()) return framed;

    std::size_t cursor = 0;
    for (std::size_t f = 0; f < frame_times.size(); ++f) {
        const TimeNs t = frame_times[f];
        while (cursor + 1 < valid.size() && track.samples[valid[cursor + 1]].t_ns <= t) ++cursor;
        // cursor is the last valid sample at or before t (or the first sample)
        std::size_t best = valid[cursor];
        if (cursor + 1 < valid.size()) {
            const TimeNs before = std::llabs(track.samples[valid[cursor]].t_ns - t);
            const TimeNs after = std::llabs(track.samples[valid[cursor + 1]].t_ns - t);
            if (after < before) best = valid[cursor + 1];
        }
        if (std::llabs(track.samples[best].t_ns - t) <= tolerance_ns) {
            framed.sample_index[f] = best;
        }
    }
    return framed;
}

} // namespace teamlens
