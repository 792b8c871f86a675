#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "teamlens/analysis.hpp"
#include "teamlens/error.hpp"
#include "teamlens/synth.hpp"

namespace fs = std::filesystem;
using namespace teamlens;

namespace {

struct CommonOpts {
    std::string manifest;
    std::string config_path;
    std::string out_dir = "out";
    bool no_eye_contact = false;
    bool no_conversation = false;
    bool emit_run_metadata = false;
    std::optional<double> fixed_threshold;
    std::optional<double> min_fixation_ms;
    std::optional<double> ec_margin_px;
    std::optional<std::string> language;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_out) {
    cmd->add_option("--manifest", opts.manifest, "session manifest JSON")->required();
    cmd->add_option("--config", opts.config_path, "analysis config JSON");
    if (needs_out) cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_flag("--no-eye-contact", opts.no_eye_contact, "skip eye-contact detection");
    cmd->add_flag("--no-conversation", opts.no_conversation, "skip conversation analysis");
    cmd->add_flag("--emit-run-metadata", opts.emit_run_metadata,
                  "write run_metadata.json (breaks byte determinism)");
    cmd->add_option("--fixed-threshold", opts.fixed_threshold,
                    "classifier fixed velocity threshold, px/s");
    cmd->add_option("--min-fixation-ms", opts.min_fixation_ms, "minimum fixation duration");
    cmd->add_option("--ec-margin-px", opts.ec_margin_px, "eye-contact box margin");
    cmd->add_option("--language", opts.language, "rule classifier language (en, ja)");
}

AnalysisConfig build_config(const CommonOpts& opts) {
    AnalysisConfig config;
    if (!opts.config_path.empty()) config = load_analysis_config(opts.config_path);
    if (opts.no_eye_contact) config.enable_eye_contact = false;
    if (opts.no_conversation) config.enable_conversation = false;
    if (opts.emit_run_metadata) config.emit_run_metadata = true;
    if (opts.fixed_threshold) {
        config.classifier.velocity_threshold_mode = ThresholdMode::fixed;
        config.classifier.fixed_threshold_px_s = *opts.fixed_threshold;
    }
    if (opts.min_fixation_ms) config.classifier.min_fixation_ms = *opts.min_fixation_ms;
    if (opts.ec_margin_px) config.eye_contact.margin_px = *opts.ec_margin_px;
    if (opts.language) config.conversation.language = *opts.language;
    config.classifier.validate();
    return config;
}

int cmd_validate(const CommonOpts& opts) {
    const AnalysisConfig config = build_config(opts);
    const auto violations = validate_session(opts.manifest, config);
    for (const auto& v : violations) {
        std::cout << v.file << ": " << v.code << ": " << v.message << "\n";
    }
    if (violations.empty() && config.enable_eye_contact) {
        // degraded subsystems warn without failing validation
        try {
            const SessionManifest manifest = parse_manifest(opts.manifest);
            bool any_faces = false;
            for (const auto& w : manifest.wearers) any_faces |= w.facetrack_path.has_value();
            if (!any_faces) {
                std::cout << "warning: eye contact enabled but no wearer has face tracks\n";
            }
        } catch (const Error&) {
        }
    }
    std::cout << (violations.empty() ? "OK" : "INVALID") << "\n";
    return violations.empty() ? 0 : 1;
}

int cmd_analyze(const CommonOpts& opts) {
    const AnalysisConfig config = build_config(opts);
    const AnalysisResult result = run_analysis(opts.manifest, config);
    write_outputs(result, config, opts.out_dir);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "report written to " << (fs::path(opts.out_dir) / "report.json").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"offline analytics for multi-wearer egocentric team sessions"};
    app.require_subcommand(1);

    CommonOpts validate_opts;
    CLI::App* validate = app.add_subcommand("validate", "check session inputs without analyzing");
    add_common(validate, validate_opts, false);

    CommonOpts analyze_opts;
    CLI::App* analyze = app.add_subcommand("analyze", "run the full pipeline and write the report");
    add_common(analyze, analyze_opts, true);

    std::string synth_spec_path;
    std::string synth_out = "synth_out";
    std::optional<std::uint64_t> synth_seed;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic session with ground truth");
    synth->add_option("--spec", synth_spec_path, "synthesis spec JSON")->required();
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--seed", synth_seed, "override the spec seed");

    std::string score_truth;
    std::string score_analysis;
    double score_tolerance_ms = 100.0;
    std::string score_out;
    CLI::App* score = app.add_subcommand("score", "compare analysis outputs against ground truth");
    score->add_option("--truth", score_truth, "ground_truth.json from synth")->required();
    score->add_option("--analysis", score_analysis, "analysis output directory")->required();
    score->add_option("--tolerance-ms", score_tolerance_ms, "event boundary tolerance");
    score->add_option("--out", score_out, "also write the scores JSON here");

    CommonOpts overlay_opts;
    std::string overlay_analysis;
    std::string overlay_out = "overlay.jsonl";
    CLI::App* overlay = app.add_subcommand("export-overlay",
                                           "emit a per-frame annotation track for rendering");
    add_common(overlay, overlay_opts, false);
    overlay->add_option("--analysis", overlay_analysis, "analysis output directory")->required();
    overlay->add_option("--out", overlay_out, "overlay JSONL path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(validate_opts);
        if (analyze->parsed()) return cmd_analyze(analyze_opts);
        if (synth->parsed()) {
            SynthSpec spec = synth_spec_from_json(read_json_file(synth_spec_path));
            if (synth_seed) spec.seed = *synth_seed;
            generate_session(spec, synth_out);
            std::cout << "session written to " << synth_out << "\n";
            return 0;
        }
        if (score->parsed()) {
            const GroundTruth truth = ground_truth_from_json(read_json_file(score_truth));
            const SessionOutputs outputs = load_outputs(score_analysis);
            const RecoveryScores scores = score_against_truth(truth, outputs, score_tolerance_ms);
            const Json doc = recovery_scores_to_json(scores);
            std::cout << doc.dump(2) << "\n";
            if (!score_out.empty()) write_json_file(score_out, doc);
            return 0;
        }
        if (overlay->parsed()) {
            export_overlay(overlay_opts.manifest, build_config(overlay_opts), overlay_analysis,
                           overlay_out);
            std::cout << "overlay written to " << overlay_out << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        // validation failures exit 1, analysis failures exit 2
        switch (e.code()) {
        case ErrorCode::MissingField:
        case ErrorCode::DuplicateWearer:
        case ErrorCode::BadCategoryMap:
        case ErrorCode::NonMonotonicTimestamps:
        case ErrorCode::EmptyStream:
        case ErrorCode::RleUnderflow:
        case ErrorCode::RleOverflow:
        case ErrorCode::UnknownObjectId:
        case ErrorCode::DegenerateBox:
        case ErrorCode::DuplicatePersonBox:
        case ErrorCode::BadRecord:
            return 1;
        default:
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
