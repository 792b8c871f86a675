#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "teamlens/gaze.hpp"
#include "teamlens/jsonl.hpp"
#include "teamlens/time_ns.hpp"

namespace teamlens {

struct FaceBox {
    std::string person_id;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    double confidence = 1.0;
};

struct FaceFrame {
    int frame_idx = 0;
    TimeNs t_ns = 0;
    std::vector<FaceBox> boxes; // at most one per person

    const FaceBox* find(const std::string& person_id) const;
};

struct FaceTrackSet {
    std::string video_owner; // wearer whose camera produced these detections
    std::vector<FaceFrame> frames; // t_ns strictly increasing

    std::vector<TimeNs> frame_times() const;
};

FaceTrackSet load_face_tracks(const std::filesystem::path& path, const std::string& video_owner,
                              TimeNs clock_offset_ns);

// Closed-interval box containment with a symmetric margin.
bool gaze_in_box(double x, double y, const FaceBox& box, double margin_px);

struct EyeContactParams {
    double margin_px = 0.0;
    double pair_tolerance_ms = 60.0; // leader frame -> nearest member frame
    double max_gap_ms = 100.0;       // instants closer than this share an event
    double min_duration_ms = 100.0;  // shorter events are discarded
};

struct MutualInstant {
    TimeNs t_ns = 0; // leader frame instant, session clock
    int leader_frame_idx = 0;
};

// Streams one wearer contributes to eye-contact detection. The framed gaze
// must be aligned to that wearer's own face-track frame times.
struct EcStreams {
    std::string wearer_id;
    const FaceTrackSet* faces = nullptr;
    const GazeTrack* track = nullptr;
    FramedGaze framed;
};

// Instants where the leader's gaze lies in the member's face box (leader
// video) and the member's gaze lies in the leader's face box (member video).
// Missing gaze or a missing box makes the instant 0.
std::vector<MutualInstant> mutual_gaze_frames(const EcStreams& leader, const EcStreams& member,
                                              double margin_px, TimeNs pair_tolerance_ns);

struct EyeContactEvent {
    std::string leader_id;
    std::string member_id;
    TimeNs start_ns = 0;
    TimeNs end_ns = 0;
    int frame_count = 0;
};

std::vector<EyeContactEvent> group_events(const std::vector<MutualInstant>& instants,
                                          const std::string& leader_id,
                                          const std::string& member_id, double max_gap_ms,
                                          double min_duration_ms);

struct DyadEyeContact {
    std::string member_id;
    std::vector<EyeContactEvent> events;
    std::size_t instant_count = 0;
};

struct EyeContactSummary {
    std::vector<DyadEyeContact> dyads;
    int total_events = 0;
    std::size_t total_instants = 0;
};

// Per-dyad detection and grouping. Requires the leader and at least one
// member with face tracks (MissingFaceTracks otherwise); members without
// tracks are skipped.
EyeContactSummary count_eye_contact(const EcStreams& leader,
                                    const std::vector<EcStreams>& members,
                                    const EyeContactParams& params);

std::vector<Json> ec_events_to_jsonl(const std::vector<EyeContactEvent>& events);
std::vector<EyeContactEvent> ec_events_from_jsonl(const std::vector<Json>& records);

} // namespace teamlens
