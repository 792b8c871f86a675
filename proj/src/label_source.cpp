#include "teamlens/label_source.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "teamlens/error.hpp"

namespace teamlens {

int LabelFrame::label_at(int col, int row) const {
    const RleRow& runs = rows[static_cast<std::size_t>(row)];
    int cell = 0;
    for (const auto& [label, len] : runs) {
        cell += len;
        if (col < cell) return label;
    }
    return 0; // unreachable for validated rows
}

LabelSource LabelSource::from_raster(LabelMapSequence seq) {
    LabelSource src;
    src.raster_ = std::move(seq);
    src.index_frames();
    return src;
}

LabelSource LabelSource::from_boxes(BoxTrackLabelSource boxes) {
    LabelSource src;
    src.boxes_ = std::move(boxes);
    src.index_frames();
    return src;
}

void LabelSource::index_frames() {
    by_frame_idx_.clear();
    if (raster_) {
        for (std::size_t i = 0; i < raster_->frames.size(); ++i) {
            by_frame_idx_[raster_->frames[i].frame_idx] = i;
        }
    } else if (boxes_) {
        for (std::size_t i = 0; i < boxes_->frames.size(); ++i) {
            by_frame_idx_[boxes_->frames[i].frame_idx] = i;
        }
    }
}

std::size_t LabelSource::frame_count() const {
    return raster_ ? raster_->frames.size() : boxes_->frames.size();
}

int LabelSource::frame_idx_at(std::size_t pos) const {
    return raster_ ? raster_->frames[pos].frame_idx : boxes_->frames[pos].frame_idx;
}

std::vector<TimeNs> LabelSource::frame_times() const {
    std::vector<TimeNs> times;
    times.reserve(frame_count());
    if (raster_) {
        for (const auto& f : raster_->frames) times.push_back(f.t_ns);
    } else {
        for (const auto& f : boxes_->frames) times.push_back(f.t_ns);
    }
    return times;
}

int LabelSource::width() const { return raster_ ? raster_->frames.front().width : boxes_->width; }
int LabelSource::height() const { return raster_ ? raster_->frames.front().height : boxes_->height; }

int LabelSource::label_at(int frame_idx, double x, double y) const {
    auto it = by_frame_idx_.find(frame_idx);
    if (it == by_frame_idx_.end()) {
        fail(ErrorCode::FrameMissing, "frame " + std::to_string(frame_idx));
    }
    return label_at_position(it->second, x, y);
}

int LabelSource::label_at_position(std::size_t pos, double x, double y) const {
    if (raster_) {
        const LabelFrame& frame = raster_->frames[pos];
        if (x < 0 || y < 0 || x >= frame.width || y >= frame.height) {
            fail(ErrorCode::PointOutOfBounds,
                 "(" + std::to_string(x) + ", " + std::to_string(y) + ") outside " +
                     std::to_string(frame.width) + "x" + std::to_string(frame.height));
        }
        return frame.label_at(static_cast<int>(x), static_cast<int>(y));
    }
    const BoxFrame& frame = boxes_->frames[pos];
    if (x < 0 || y < 0 || x >= boxes_->width || y >= boxes_->height) {
        fail(ErrorCode::PointOutOfBounds,
             "(" + std::to_string(x) + ", " + std::to_string(y) + ") outside " +
                 std::to_string(boxes_->width) + "x" + std::to_string(boxes_->height));
    }
    for (int object_id : boxes_->priority) {
        for (const auto& box : frame.boxes) {
            if (box.object_id != object_id) continue;
            if (x >= box.x0 && x <= box.x1 && y >= box.y0 && y <= box.y1) return object_id;
        }
    }
    return 0;
}

namespace {

void check_object_id(int label, const std::map<int, std::string>& category_map,
                     const std::string& context, bool allow_background) {
    if (label == 0 && allow_background) return;
    if (category_map.count(label) == 0) {
        fail(ErrorCode::UnknownObjectId, context + ": object id " + std::to_string(label));
    }
}

std::vector<int> default_priority(const std::map<int, std::string>& category_map) {
    std::vector<int> ids;
    for (const auto& [id, cat] : category_map) ids.push_back(id);
    return ids; // ascending object id
}

} // namespace

LabelSource load_label_source(const std::filesystem::path& path,
                              const std::map<int, std::string>& category_map,
                              TimeNs clock_offset_ns,
                              const std::vector<int>& priority_override) {
    const auto records = read_jsonl(path);
    if (records.empty()) fail(ErrorCode::EmptyStream, path.string());

    const bool raster = records.front().value.contains("rows");
    TimeNs prev_t = 0;
    bool first = true;
    std::set<int> seen_frames;

    if (raster) {
        LabelMapSequence seq;
        for (const auto& rec : records) {
            const std::string context = path.string() + ":" + std::to_string(rec.line);
            LabelFrame frame;
            frame.frame_idx = require_field(rec.value, "frame_idx", context).get<int>();
            frame.t_ns = require_field(rec.value, "t_ns", context).get<TimeNs>() + clock_offset_ns;
            frame.width = require_field(rec.value, "w", context).get<int>();
            frame.height = require_field(rec.value, "h", context).get<int>();
            if (frame.width <= 0 || frame.height <= 0) {
                fail(ErrorCode::BadRecord, context + ": non-positive frame dimensions");
            }
            if (!seen_frames.insert(frame.frame_idx).second) {
                fail(ErrorCode::BadRecord,
                     context + ": duplicate frame_idx " + std::to_string(frame.frame_idx));
            }
            if (!first && frame.t_ns <= prev_t) {
                fail(ErrorCode::NonMonotonicTimestamps, context + ": label map frame times");
            }
            prev_t = frame.t_ns;
            first = false;

            const Json& rows = require_field(rec.value, "rows", context);
            if (!rows.is_array()) fail(ErrorCode::BadRecord, context + ": rows must be an array");
            if (static_cast<int>(rows.size()) < frame.height) {
                fail(ErrorCode::RleUnderflow,
                     context + ": " + std::to_string(rows.size()) + " rows for height " +
                         std::to_string(frame.height));
            }
            if (static_cast<int>(rows.size()) > frame.height) {
                fail(ErrorCode::RleOverflow,
                     context + ": " + std::to_string(rows.size()) + " rows for height " +
                         std::to_string(frame.height));
            }
            for (const auto& row_json : rows) {
                RleRow row;
                long long total = 0;
                for (const auto& run : row_json) {
                    if (!run.is_array() || run.size() != 2) {
                        fail(ErrorCode::BadRecord, context + ": run must be [label, length]");
                    }
                    const int label = run[0].get<int>();
                    const int len = run[1].get<int>();
                    if (len <= 0) fail(ErrorCode::BadRecord, context + ": run length must be >= 1");
                    check_object_id(label, category_map, context, true);
                    total += len;
                    row.emplace_back(label, len);
                }
                if (total < frame.width) {
                    fail(ErrorCode::RleUnderflow,
                         context + ": row decodes to " + std::to_string(total) + " of " +
                             std::to_string(frame.width) + " cells");
                }
                if (total > frame.width) {
                    fail(ErrorCode::RleOverflow,
                         context + ": row decodes to " + std::to_string(total) + " of " +
                             std::to_string(frame.width) + " cells");
                }
                frame.rows.push_back(std::move(row));
            }
            seq.frames.push_back(std::move(frame));
        }
        seq.n_objects = category_map.empty() ? 0 : category_map.rbegin()->first;
        return LabelSource::from_raster(std::move(seq));
    }

    BoxTrackLabelSource src;
    src.priority = priority_override.empty() ? default_priority(category_map) : priority_override;
    {
        // priority must be a permutation of the mapped object ids
        std::set<int> prio(src.priority.begin(), src.priority.end());
        std::set<int> ids;
        for (const auto& [id, cat] : category_map) ids.insert(id);
        if (prio != ids || prio.size() != src.priority.size()) {
            fail(ErrorCode::BadRecord, path.string() + ": priority must be a permutation of object ids");
        }
    }
    for (const auto& rec : records) {
        const std::string context = path.string() + ":" + std::to_string(rec.line);
        BoxFrame frame;
        frame.frame_idx = require_field(rec.value, "frame_idx", context).get<int>();
        frame.t_ns = require_field(rec.value, "t_ns", context).get<TimeNs>() + clock_offset_ns;
        if (!seen_frames.insert(frame.frame_idx).second) {
            fail(ErrorCode::BadRecord, context + ": duplicate frame_idx " + std::to_string(frame.frame_idx));
        }
        if (!first && frame.t_ns <= prev_t) {
            fail(ErrorCode::NonMonotonicTimestamps, context + ": box track frame times");
        }
        prev_t = frame.t_ns;
        first = false;

        const Json& boxes = require_field(rec.value, "boxes", context);
        for (const auto& bj : boxes) {
            ObjectBox box;
            box.object_id = require_field(bj, "object_id", context).get<int>();
            check_object_id(box.object_id, category_map, context, false);
            box.x0 = require_field(bj, "x0", context).get<double>();
            box.y0 = require_field(bj, "y0", context).get<double>();
            box.x1 = require_field(bj, "x1", context).get<double>();
            box.y1 = require_field(bj, "y1", context).get<double>();
            if (!(box.x0 < box.x1) || !(box.y0 < box.y1)) {
                fail(ErrorCode::DegenerateBox,
                     context + ": object " + std::to_string(box.object_id));
            }
            frame.boxes.push_back(box);
        }
        src.frames.push_back(std::move(frame));
    }

    // Frame dimensions for the bounds check: the enclosing extent of all
    // boxes rounded up; callers with real stream metadata clamp via config.
    double max_x = 1, max_y = 1;
    for (const auto& f : src.frames) {
        for (const auto& b : f.boxes) {
            max_x = std::max(max_x, b.x1);
            max_y = std::max(max_y, b.y1);
        }
    }
    src.width = static_cast<int>(std::ceil(max_x)) + 1;
    src.height = static_cast<int>(std::ceil(max_y)) + 1;
    return LabelSource::from_boxes(std::move(src));
}

LabelFrame render_raster_frame(int frame_idx, TimeNs t_ns, int width, int height,
                               const std::vector<ObjectBox>& boxes,
                               const std::vector<int>& priority) {
    LabelFrame frame;
    frame.frame_idx = frame_idx;
    frame.t_ns = t_ns;
    frame.width = width;
    frame.height = height;
    frame.rows.reserve(static_cast<std::size_t>(height));

    for (int row = 0; row < height; ++row) {
        RleRow rle;
        int col = 0;
        while (col < width) {
            int label = 0;
            for (int object_id : priority) {
                bool hit = false;
                // A cell belongs to a box when its center does, so raster and
                // box lookups agree at cell centers.
                for (const auto& b : boxes) {
                    if (b.object_id != object_id) continue;
                    if (col + 0.5 >= b.x0 && col + 0.5 <= b.x1 && row + 0.5 >= b.y0 &&
                        row + 0.5 <= b.y1) {
                        hit = true;
                        break;
                    }
                }
                if (hit) {
                    label = object_id;
                    break;
                }
            }
            if (!rle.empty() && rle.back().first == label) {
                ++rle.back().second;
            } else {
                rle.emplace_back(label, 1);
            }
            ++col;
        }
        frame.rows.push_back(std::move(rle));
    }
    return frame;
}

Json label_frame_to_json(const LabelFrame& frame) {
    Json rows = Json::array();
    for (const auto& row : frame.rows) {
        Json rj = Json::array();
        for (const auto& [label, len] : row) rj.push_back(Json::array({label, len}));
        rows.push_back(std::move(rj));
    }
    return Json{
        {"frame_idx", frame.frame_idx},
        {"t_ns", frame.t_ns},
        {"w", frame.width},
        {"h", frame.height},
        {"rows", rows},
    };
}

Json box_frame_to_json(const BoxFrame& frame) {
    Json boxes = Json::array();
    for (const auto& b : frame.boxes) {
        boxes.push_back(Json{
            {"object_id", b.object_id},
            {"x0", b.x0},
            {"y0", b.y0},
            {"x1", b.x1},
            {"y1", b.y1},
        });
    }
    return Json{{"frame_idx", frame.frame_idx}, {"t_ns", frame.t_ns}, {"boxes", boxes}};
}

} // namespace teamlens
