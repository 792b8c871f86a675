#pragma once

#include <map>
#include <string>
#include <vector>

#include "teamlens/gaze.hpp"
#include "teamlens/gaze_events.hpp"
#include "teamlens/label_source.hpp"

namespace teamlens {

struct FixationAssignment {
    std::size_t fix_idx = 0;
    TimeNs start_ns = 0;
    TimeNs end_ns = 0;
    int object_id = 0;
    std::string category = "unknown";
    double support = 1.0; // winner votes / total votes, in (0, 1]
    int total_votes = 0;
    int winner_votes = 0;
};

// Tie rule for equal vote counts: the higher-priority category wins; within a
// category, the lower object id.
struct TieBreak {
    std::vector<std::string> category_priority = {"patient", "member", "screen", "device",
                                                  "unknown"};

    std::size_t rank_of(const std::string& category) const;
};

// Majority vote over every frame inside [start_ns, end_ns) that carries an
// aligned valid gaze sample. Background (0) votes like any other label and
// resolves to "unknown". No votes at all also resolves to background.
FixationAssignment assign_fixation(std::size_t fix_idx, const EyeMovementEvent& fix,
                                   const LabelSource& labels, const FramedGaze& framed,
                                   const GazeTrack& track,
                                   const std::map<int, std::string>& category_map,
                                   const TieBreak& tie = {});

std::vector<FixationAssignment> assign_all(const EventTimeline& timeline,
                                           const LabelSource& labels, const FramedGaze& framed,
                                           const GazeTrack& track,
                                           const std::map<int, std::string>& category_map,
                                           const TieBreak& tie = {});

std::vector<Json> assignments_to_jsonl(const std::vector<FixationAssignment>& assignments);
std::vector<FixationAssignment> assignments_from_jsonl(const std::vector<Json>& records);

} // namespace teamlens
