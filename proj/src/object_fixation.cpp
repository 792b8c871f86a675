#include "teamlens/object_fixation.hpp"

#include <algorithm>

#include "teamlens/error.hpp"

namespace teamlens {

std::size_t TieBreak::rank_of(const std::string& category) const {
    for (std::size_t i = 0; i < category_priority.size(); ++i) {
        if (category_priority[i] == category) return i;
    }
    return category_priority.size();
}

namespace {

std::string category_of(const std::map<int, std::string>& category_map, int object_id) {
    auto it = category_map.find(object_id);
    return it == category_map.end() ? std::string("unknown") : it->second;
}

} // namespace

FixationAssignment assign_fixation(std::size_t fix_idx, const EyeMovementEvent& fix,
                                   const LabelSource& labels, const FramedGaze& framed,
                                   const GazeTrack& track,
                                   const std::map<int, std::string>& category_map,
                                   const TieBreak& tie) {
    FixationAssignment out;
    out.fix_idx = fix_idx;
    out.start_ns = fix.start_ns;
    out.end_ns = fix.end_ns;

    const double max_x = std::nextafter(static_cast<double>(labels.width()), 0.0);
    const double max_y = std::nextafter(static_cast<double>(labels.height()), 0.0);

    std::map<int, int> votes;
    int total = 0;
    for (std::size_t pos = 0; pos < framed.frame_times.size(); ++pos) {
        if (!fix.contains(framed.frame_times[pos])) continue;
        if (!framed.sample_index[pos]) continue;
        const GazeSample& s = track.samples[*framed.sample_index[pos]];
        // valid gaze allows x == W exactly; clamp onto the last cell
        const double x = std::clamp(s.x, 0.0, max_x);
        const double y = std::clamp(s.y, 0.0, max_y);
        ++votes[labels.label_at_position(pos, x, y)];
        ++total;
    }

    if (total == 0) {
        out.object_id = 0;
        out.category = "unknown";
        out.support = 1.0;
        return out;
    }

    int best_label = -1;
    int best_count = -1;
    for (const auto& [label, count] : votes) {
        if (count > best_count) {
            best_label = label;
            best_count = count;
            continue;
        }
        if (count == best_count) {
            const auto lhs_rank = tie.rank_of(category_of(category_map, label));
            const auto rhs_rank = tie.rank_of(category_of(category_map, best_label));
            if (lhs_rank < rhs_rank || (lhs_rank == rhs_rank && label < best_label)) {
                best_label = label;
            }
        }
    }

    out.object_id = best_label;
    out.category = category_of(category_map, best_label);
    out.total_votes = total;
    out.winner_votes = best_count;
    out.support = static_cast<double>(best_count) / static_cast<double>(total);
    return out;
}

std::vector<FixationAssignment> assign_all(const EventTimeline& timeline,
                                           const LabelSource& labels, const FramedGaze& framed,
                                           const GazeTrack& track,
                                           const std::map<int, std::string>& category_map,
                                           const TieBreak& tie) {
    std::vector<FixationAssignment> out;
    std::size_t fix_idx = 0;
    for (const auto& ev : timeline.events) {
        if (ev.kind != EventKind::fixation) continue;
        out.push_back(assign_fixation(fix_idx, ev, labels, framed, track, category_map, tie));
        ++fix_idx;
    }
    return out;
}

std::vector<Json> assignments_to_jsonl(const std::vector<FixationAssignment>& assignments) {
    std::vector<Json> records;
    records.reserve(assignments.size());
    for (const auto& a : assignments) {
        records.push_back(Json{
            {"fix_idx", a.fix_idx},
            {"start_ns", a.start_ns},
            {"end_ns", a.end_ns},
            {"object_id", a.object_id},
            {"category", a.category},
            {"support", a.support},
        });
    }
    return records;
}

std::vector<FixationAssignment> assignments_from_jsonl(const std::vector<Json>& records) {
    std::vector<FixationAssignment> out;
    for (const auto& rec : records) {
        FixationAssignment a;
        a.fix_idx = rec.at("fix_idx").get<std::size_t>();
        a.start_ns = rec.at("start_ns").get<TimeNs>();
        a.end_ns = rec.at("end_ns").get<TimeNs>();
        a.object_id = rec.at("object_id").get<int>();
        a.category = rec.at("category").get<std::string>();
        a.support = rec.at("support").get<double>();
        out.push_back(std::move(a));
    }
    return out;
}

} // namespace teamlens
