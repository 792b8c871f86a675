#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "teamlens/conversation.hpp"
#include "teamlens/eye_contact.hpp"
#include "teamlens/gaze_events.hpp"
#include "teamlens/manifest.hpp"
#include "teamlens/metrics.hpp"
#include "teamlens/object_fixation.hpp"
#include "teamlens/synth.hpp"

namespace teamlens {

struct ConversationConfig {
    enum class Mode { annotation, rule, external };
    Mode mode = Mode::rule; // annotation labels always win; mode fills the rest
    std::string language = "en";
    std::optional<AdapterConfig> adapter;
};

struct ReportConfig {
    bool include_self = true;
    bool exclude_unknown_state = false;
    std::optional<std::string> team_score;
    std::optional<std::string> ottawa_score;
};

struct AnalysisConfig {
    StreamMeta stream;
    ClassifierParams classifier;
    double alignment_tolerance_ms = 60.0;
    EyeContactParams eye_contact;
    ConversationConfig conversation;
    ReportConfig report;
    TieBreak tie_break;
    std::vector<int> label_priority; // box-overlap precedence override
    bool enable_eye_contact = true;
    bool enable_conversation = true;
    bool emit_run_metadata = false;
};

Json analysis_config_to_json(const AnalysisConfig& config);
AnalysisConfig analysis_config_from_json(const Json& doc);
AnalysisConfig load_analysis_config(const std::filesystem::path& path);

struct AnalysisResult {
    SessionManifest manifest;
    std::optional<GazeTrack> leader_track;
    std::optional<EventTimeline> timeline;
    std::optional<std::vector<FixationAssignment>> assignments;
    std::optional<EyeContactSummary> eye_contact;
    std::optional<std::vector<Utterance>> utterances;
    std::optional<std::map<IntentLabel, double>> conv_ratios;
    LeadershipReport report;
    std::vector<std::string> warnings;

    SessionOutputs to_outputs() const;
};

// Full pipeline over one session. Paths in the manifest resolve relative to
// the manifest's directory. Subsystems with missing inputs become null report
// sections; IncompleteSession only when no subsystem has anything to work on.
AnalysisResult run_analysis(const std::filesystem::path& manifest_path,
                            const AnalysisConfig& config);

// report.json, report.md, transition.csv plus the per-subsystem JSONL exports
// and the classifier params sidecar. Byte-deterministic for fixed inputs
// unless emit_run_metadata is set.
void write_outputs(const AnalysisResult& result, const AnalysisConfig& config,
                   const std::filesystem::path& out_dir);

struct Violation {
    std::string file;
    std::string code; // error name
    std::string message;
};

// Runs every loader in validation mode and collects failures instead of
// stopping at the first.
std::vector<Violation> validate_session(const std::filesystem::path& manifest_path,
                                        const AnalysisConfig& config);

// Per-frame annotation track for external renderers: gaze point, event kind,
// fixation category, eye-contact flag, active utterance label. Reads the
// exports written by write_outputs; MissingAnalysis when they are absent.
void export_overlay(const std::filesystem::path& manifest_path, const AnalysisConfig& config,
                    const std::filesystem::path& analysis_dir,
                    const std::filesystem::path& out_path);

// Rebuilds SessionOutputs from an analysis export directory (for `score`).
SessionOutputs load_outputs(const std::filesystem::path& analysis_dir);

} // namespace teamlens
