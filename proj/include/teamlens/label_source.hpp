#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "teamlens/jsonl.hpp"
#include "teamlens/time_ns.hpp"

namespace teamlens {

// One row of a run-length-encoded label raster: (label, run length) pairs
// that must decode to exactly the frame width.
using RleRow = std::vector<std::pair<int, int>>;

struct LabelFrame {
    int frame_idx = 0;
    TimeNs t_ns = 0;
    int width = 0;
    int height = 0;
    std::vector<RleRow> rows;

    int label_at(int col, int row) const;
};

struct LabelMapSequence {
    std::vector<LabelFrame> frames; // t_ns strictly increasing
    int n_objects = 0;
    std::string provenance;
};

struct ObjectBox {
    int object_id = 0;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct BoxFrame {
    int frame_idx = 0;
    TimeNs t_ns = 0;
    std::vector<ObjectBox> boxes;
};

struct BoxTrackLabelSource {
    std::vector<BoxFrame> frames;
    std::vector<int> priority; // object ids, highest precedence first
    int width = 0;
    int height = 0;
};

// Per-frame object labels behind one lookup, whether backed by dense RLE
// rasters or by prioritized box tracks.
class LabelSource {
public:
    static LabelSource from_raster(LabelMapSequence seq);
    static LabelSource from_boxes(BoxTrackLabelSource boxes);

    // Label under a point, by frame index. Throws FrameMissing for unknown
    // frames and PointOutOfBounds for points outside [0,W)x[0,H).
    int label_at(int frame_idx, double x, double y) const;

    // Same lookup by position in the frame list (no index search).
    int label_at_position(std::size_t pos, double x, double y) const;

    std::size_t frame_count() const;
    int frame_idx_at(std::size_t pos) const;
    std::vector<TimeNs> frame_times() const;
    bool is_raster() const { return raster_.has_value(); }
    int width() const;
    int height() const;

    const LabelMapSequence* raster() const { return raster_ ? &*raster_ : nullptr; }
    const BoxTrackLabelSource* boxes() const { return boxes_ ? &*boxes_ : nullptr; }

private:
    std::optional<LabelMapSequence> raster_;
    std::optional<BoxTrackLabelSource> boxes_;
    std::map<int, std::size_t> by_frame_idx_;

    void index_frames();
};

// Auto-detects the format from the first record: "rows" means RLE raster,
// "boxes" means box tracks. Validates against the manifest category map;
// timestamps are shifted by clock_offset_ns onto the session clock.
LabelSource load_label_source(const std::filesystem::path& path,
                              const std::map<int, std::string>& category_map,
                              TimeNs clock_offset_ns,
                              const std::vector<int>& priority_override = {});

// Rasterizes one box layout; overlaps resolved by priority order. Shared by
// the synthetic generator and the raster/box agreement checks.
LabelFrame render_raster_frame(int frame_idx, TimeNs t_ns, int width, int height,
                               const std::vector<ObjectBox>& boxes,
                               const std::vector<int>& priority);

Json label_frame_to_json(const LabelFrame& frame);
Json box_frame_to_json(const BoxFrame& frame);

} // namespace teamlens
