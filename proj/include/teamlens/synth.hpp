#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teamlens/conversation.hpp"
#include "teamlens/gaze_events.hpp"
#include "teamlens/jsonl.hpp"
#include "teamlens/label_source.hpp"
#include "teamlens/metrics.hpp"
#include "teamlens/object_fixation.hpp"

namespace teamlens {

// One scripted segment. Gaze segments (gap / fixation / saccade /
// mutual_gaze) tile the leader's timeline in order; utterances run on their
// own cursor.
struct SynthSegment {
    enum class Kind { gap, fixation, saccade, mutual_gaze, utterance };
    Kind kind = Kind::gap;
    double duration_s = 0.0; // saccades may leave 0 for distance / 600 px/s
    int object_id = 0;                                // fixation target
    std::optional<std::pair<double, double>> point;   // background fixation target
    std::string member;                               // mutual_gaze partner
    std::string speaker;                              // utterance fields
    std::string text;
    std::optional<IntentLabel> label;
};

struct SceneObject {
    int object_id = 0;
    std::string category;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    std::string wearer; // set on member boxes: whose face this is

    double cx() const { return 0.5 * (x0 + x1); }
    double cy() const { return 0.5 * (y0 + y1); }
};

struct SynthSpec {
    std::uint64_t seed = 1;
    std::string session_id = "synth";
    double duration_s = 60.0;
    double gaze_rate_hz = 10.0;
    double frame_rate_hz = 30.0;
    int width = 1280;
    int height = 960;
    double noise_px = 0.0;
    std::string leader_id = "leader";
    std::vector<std::string> members;
    std::vector<SceneObject> scene;                 // leader's egocentric scene
    SceneObject leader_face{0, "member", 540, 380, 740, 580, ""}; // in member videos
    std::pair<double, double> member_rest_point{30.0, 30.0};
    bool raster_labels = false; // emit dense RLE rasters instead of box tracks
    std::vector<SynthSegment> script;
};

SynthSpec synth_spec_from_json(const Json& doc);
Json synth_spec_to_json(const SynthSpec& spec);

struct TruthEvent {
    EventKind kind = EventKind::other;
    TimeNs start_ns = 0;
    TimeNs end_ns = 0;
    int object_id = 0;
    std::string category;
};

struct TruthEyeContact {
    std::string member;
    TimeNs start_ns = 0;
    TimeNs end_ns = 0;
};

struct GroundTruth {
    std::string session_id;
    std::string leader_id;
    std::vector<TruthEvent> events; // leader gaze events, session clock
    std::vector<TruthEyeContact> eye_contact;
    std::vector<Utterance> utterances;
    std::vector<std::string> category_sequence; // fixation categories in order
};

Json ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const Json& doc);

// Writes manifest.json, per-wearer gaze/face-track streams, the leader's
// label maps, transcript.jsonl, and ground_truth.json into out_dir. All
// outputs are byte-identical for the same spec (seeded splitmix64, fixed
// serialization). Throws InfeasibleScript on over-long or malformed scripts.
GroundTruth generate_session(const SynthSpec& spec, const std::filesystem::path& out_dir);

// Pipeline outputs to score, detached from where they came from so both the
// in-process pipeline and exported files can be checked.
struct SessionOutputs {
    std::string session_id;
    std::vector<EyeMovementEvent> events;
    std::vector<FixationAssignment> assignments;
    std::map<std::string, int> ec_counts; // member -> grouped event count
    std::vector<Utterance> utterances;
    std::optional<TransitionMatrix> transition;
};

struct RecoveryScores {
    double boundary_agreement = 0.0; // matched fixations+saccades / planted
    std::size_t truth_events = 0;
    std::size_t matched_events = 0;
    double object_accuracy = 0.0; // correct categories among matched fixations
    int ec_delta_total = 0;       // recovered - planted
    std::map<std::string, int> ec_delta_per_dyad;
    bool transition_equal = false;
    double conversation_accuracy = 0.0;
};

Json recovery_scores_to_json(const RecoveryScores& scores);

// Boundary matching: a planted event counts as recovered when some unused
// output event of the same kind has both start and end within tolerance.
RecoveryScores score_against_truth(const GroundTruth& truth, const SessionOutputs& outputs,
                                   double tolerance_ms);

} // namespace teamlens
