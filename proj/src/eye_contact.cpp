#include "teamlens/eye_contact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "teamlens/error.hpp"

namespace teamlens {

const FaceBox* FaceFrame::find(const std::string& person_id) const {
    for (const auto& box : boxes) {
        if (box.person_id == person_id) return &box;
    }
    return nullptr;
}

std::vector<TimeNs> FaceTrackSet::frame_times() const {
    std::vector<TimeNs> times;
    times.reserve(frames.size());
    for (const auto& f : frames) times.push_back(f.t_ns);
    return times;
}

FaceTrackSet load_face_tracks(const std::filesystem::path& path, const std::string& video_owner,
                              TimeNs clock_offset_ns) {
    FaceTrackSet set;
    set.video_owner = video_owner;

    const auto records = read_jsonl(path);
    if (records.empty()) fail(ErrorCode::EmptyStream, path.string());

    TimeNs prev_t = 0;
    bool first = true;
    std::set<int> seen_frames;
    for (const auto& rec : records) {
        const std::string context = path.string() + ":" + std::to_string(rec.line);
        FaceFrame frame;
        frame.frame_idx = require_field(rec.value, "frame_idx", context).get<int>();
        frame.t_ns = require_field(rec.value, "t_ns", context).get<TimeNs>() + clock_offset_ns;
        if (!seen_frames.insert(frame.frame_idx).second) {
            fail(ErrorCode::BadRecord, context + ": duplicate frame_idx " + std::to_string(frame.frame_idx));
        }
        if (!first && frame.t_ns <= prev_t) {
            fail(ErrorCode::NonMonotonicTimestamps, context + ": face track frame times");
        }
        prev_t = frame.t_ns;
        first = false;

        std::set<std::string> persons;
        const Json& boxes = require_field(rec.value, "boxes", context);
        for (const auto& bj : boxes) {
            FaceBox box;
            box.person_id = require_field(bj, "person_id", context).get<std::string>();
            box.x0 = require_field(bj, "x0", context).get<double>();
            box.y0 = require_field(bj, "y0", context).get<double>();
            box.x1 = require_field(bj, "x1", context).get<double>();
            box.y1 = require_field(bj, "y1", context).get<double>();
            if (bj.contains("conf") && !bj["conf"].is_null()) box.confidence = bj["conf"].get<double>();
            if (!(box.x0 < box.x1) || !(box.y0 < box.y1)) {
                fail(ErrorCode::DegenerateBox, context + ": person \"" + box.person_id + "\"");
            }
            if (!persons.insert(box.person_id).second) {
                fail(ErrorCode::DuplicatePersonBox, context + ": person \"" + box.person_id + "\"");
            }
            frame.boxes.push_back(std::move(box));
        }
        set.frames.push_back(std::move(frame));
    }
    return set;
}

bool gaze_in_box(double x, double y, const FaceBox& box, double margin_px) {
    return x >= box.x0 - margin_px && x <= box.x1 + margin_px && y >= box.y0 - margin_px &&
           y <= box.y1 + margin_px;
}

namespace {

// Index of the frame nearest to t, or nullopt when farther than tolerance.
// Ties pick the earlier frame.
std::optional<std::size_t> nearest_frame(const std::vector<FaceFrame>& frames, TimeNs t,
                                         TimeNs tolerance_ns) {
    if (frames.empty()) return std::nullopt;
    auto it = std::lower_bound(frames.begin(), frames.end(), t,
                               [](const FaceFrame& f, TimeNs v) { return f.t_ns < v; });
    std::size_t best;
    if (it == frames.begin()) {
        best = 0;
    } else if (it == frames.end()) {
        best = frames.size() - 1;
    } else {
        const std::size_t after = static_cast<std::size_t>(it - frames.begin());
        const std::size_t before = after - 1;
        best = (std::llabs(frames[after].t_ns - t) < std::llabs(frames[before].t_ns - t)) ? after
                                                                                          : before;
    }
    if (std::llabs(frames[best].t_ns - t) > tolerance_ns) return std::nullopt;
    return best;
}

bool gaze_hits_face(const EcStreams& viewer, std::size_t frame_pos, const std::string& target_id,
                    double margin_px) {
    if (!viewer.framed.has(frame_pos)) return false;
    const FaceBox* box = viewer.faces->frames[frame_pos].find(target_id);
    if (!box) return false;
    const GazeSample& s = viewer.track->samples[*viewer.framed.sample_index[frame_pos]];
    return gaze_in_box(s.x, s.y, *box, margin_px);
}

} // namespace

std::vector<MutualInstant> mutual_gaze_frames(const EcStreams& leader, const EcStreams& member,
                                              double margin_px, TimeNs pair_tolerance_ns) {
    std::vector<MutualInstant> instants;
    if (!leader.faces || !member.faces || !leader.track || !member.track) return instants;

    for (std::size_t i = 0; i < leader.faces->frames.size(); ++i) {
        const FaceFrame& lf = leader.faces->frames[i];
        if (!gaze_hits_face(leader, i, member.wearer_id, margin_px)) continue;
        const auto j = nearest_frame(member.faces->frames, lf.t_ns, pair_tolerance_ns);
        if (!j) continue;
        if (!gaze_hits_face(member, *j, leader.wearer_id, margin_px)) continue;
        instants.push_back({lf.t_ns, lf.frame_idx});
    }
    return instants;
}

std::vector<EyeContactEvent> group_events(const std::vector<MutualInstant>& instants,
                                          const std::string& leader_id,
                                          const std::string& member_id, double max_gap_ms,
                                          double min_duration_ms) {
    std::vector<EyeContactEvent> events;
    const TimeNs max_gap_ns = ms_to_ns(max_gap_ms);
    const TimeNs min_duration_ns = ms_to_ns(min_duration_ms);

    std::size_t i = 0;
    while (i < instants.size()) {
        std::size_t j = i;
        while (j + 1 < instants.size() && instants[j + 1].t_ns - instants[j].t_ns <= max_gap_ns) {
            ++j;
        }
        const TimeNs start = instants[i].t_ns;
        const TimeNs end = instants[j].t_ns;
        if (end - start >= min_duration_ns) {
            events.push_back({leader_id, member_id, start, end, static_cast<int>(j - i + 1)});
        }
        i = j + 1;
    }
    return events;
}

EyeContactSummary count_eye_contact(const EcStreams& leader, const std::vector<EcStreams>& members,
                                    const EyeContactParams& params) {
    if (!leader.faces || leader.faces->frames.empty()) {
        fail(ErrorCode::MissingFaceTracks, "wearer \"" + leader.wearer_id + "\"");
    }
    std::vector<const EcStreams*> usable;
    for (const auto& m : members) {
        if (m.faces && !m.faces->frames.empty()) usable.push_back(&m);
    }
    if (usable.empty()) {
        fail(ErrorCode::MissingFaceTracks, "no member has face tracks");
    }

    EyeContactSummary summary;
    const TimeNs pair_tol = ms_to_ns(params.pair_tolerance_ms);
    for (const EcStreams* member : usable) {
        const auto instants = mutual_gaze_frames(leader, *member, params.margin_px, pair_tol);
        DyadEyeContact dyad;
        dyad.member_id = member->wearer_id;
        dyad.instant_count = instants.size();
        dyad.events = group_events(instants, leader.wearer_id, member->wearer_id,
                                   params.max_gap_ms, params.min_duration_ms);
        summary.total_events += static_cast<int>(dyad.events.size());
        summary.total_instants += dyad.instant_count;
        summary.dyads.push_back(std::move(dyad));
    }
    return summary;
}

std::vector<Json> ec_events_to_jsonl(const std::vector<EyeContactEvent>& events) {
    std::vector<Json> records;
    records.reserve(events.size());
    for (const auto& ev : events) {
        records.push_back(Json{
            {"leader", ev.leader_id},
            {"member", ev.member_id},
            {"start_ns", ev.start_ns},
            {"end_ns", ev.end_ns},
            {"frame_count", ev.frame_count},
        });
    }
    return records;
}

std::vector<EyeContactEvent> ec_events_from_jsonl(const std::vector<Json>& records) {
    std::vector<EyeContactEvent> events;
    for (const auto& rec : records) {
        EyeContactEvent ev;
        ev.leader_id = rec.at("leader").get<std::string>();
        ev.member_id = rec.at("member").get<std::string>();
        ev.start_ns = rec.at("start_ns").get<TimeNs>();
        ev.end_ns = rec.at("end_ns").get<TimeNs>();
        ev.frame_count = rec.at("frame_count").get<int>();
        events.push_back(std::move(ev));
    }
    return events;
}

} // namespace teamlens
