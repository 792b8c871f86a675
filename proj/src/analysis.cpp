#include "teamlens/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "teamlens/error.hpp"
#include "teamlens/label_source.hpp"

namespace teamlens {

Json analysis_config_to_json(const AnalysisConfig& c) {
    Json conv = {
        {"mode", c.conversation.mode == ConversationConfig::Mode::annotation ? "annotation"
                 : c.conversation.mode == ConversationConfig::Mode::external ? "external"
                                                                             : "rule"},
        {"language", c.conversation.language},
    };
    if (c.conversation.adapter) {
        const auto& a = *c.conversation.adapter;
        conv["adapter"] = Json{
            {"transport", a.transport == AdapterConfig::Transport::http ? "http" : "subprocess"},
            {"command", a.command},
            {"url", a.url},
            {"timeout_s", a.timeout_s},
        };
    }
    Json rep = {
        {"include_self", c.report.include_self},
        {"exclude_unknown_state", c.report.exclude_unknown_state},
    };
    if (c.report.team_score) rep["team_score"] = *c.report.team_score;
    if (c.report.ottawa_score) rep["ottawa_score"] = *c.report.ottawa_score;

    return Json{
        {"stream", Json{{"width", c.stream.width},
                        {"height", c.stream.height},
                        {"gaze_rate_hz", c.stream.nominal_rate_hz}}},
        {"classifier", classifier_params_to_json(c.classifier)},
        {"alignment", Json{{"tolerance_ms", c.alignment_tolerance_ms}}},
        {"eye_contact", Json{{"margin_px", c.eye_contact.margin_px},
                             {"pair_tolerance_ms", c.eye_contact.pair_tolerance_ms},
                             {"max_gap_ms", c.eye_contact.max_gap_ms},
                             {"min_duration_ms", c.eye_contact.min_duration_ms}}},
        {"conversation", conv},
        {"report", rep},
        {"tie_break", Json{{"category_priority", c.tie_break.category_priority}}},
        {"label_priority", c.label_priority},
        {"enable_eye_contact", c.enable_eye_contact},
        {"enable_conversation", c.enable_conversation},
        {"emit_run_metadata", c.emit_run_metadata},
    };
}

AnalysisConfig analysis_config_from_json(const Json& doc) {
    AnalysisConfig c;
    if (doc.contains("stream")) {
        const auto& s = doc["stream"];
        if (s.contains("width")) c.stream.width = s["width"].get<int>();
        if (s.contains("height")) c.stream.height = s["height"].get<int>();
        if (s.contains("gaze_rate_hz")) c.stream.nominal_rate_hz = s["gaze_rate_hz"].get<double>();
    }
    if (doc.contains("classifier")) c.classifier = classifier_params_from_json(doc["classifier"]);
    if (doc.contains("alignment") && doc["alignment"].contains("tolerance_ms")) {
        c.alignment_tolerance_ms = doc["alignment"]["tolerance_ms"].get<double>();
    }
    if (doc.contains("eye_contact")) {
        const auto& e = doc["eye_contact"];
        if (e.contains("margin_px")) c.eye_contact.margin_px = e["margin_px"].get<double>();
        if (e.contains("pair_tolerance_ms")) c.eye_contact.pair_tolerance_ms = e["pair_tolerance_ms"].get<double>();
        if (e.contains("max_gap_ms")) c.eye_contact.max_gap_ms = e["max_gap_ms"].get<double>();
        if (e.contains("min_duration_ms")) c.eye_contact.min_duration_ms = e["min_duration_ms"].get<double>();
    }
    if (doc.contains("conversation")) {
        const auto& v = doc["conversation"];
        if (v.contains("mode")) {
            const std::string mode = v["mode"].get<std::string>();
            if (mode == "annotation") c.conversation.mode = ConversationConfig::Mode::annotation;
            else if (mode == "external") c.conversation.mode = ConversationConfig::Mode::external;
            else if (mode == "rule") c.conversation.mode = ConversationConfig::Mode::rule;
            else fail(ErrorCode::BadRecord, "conversation.mode must be annotation, rule, or external");
        }
        if (v.contains("language")) c.conversation.language = v["language"].get<std::string>();
        if (v.contains("adapter")) {
            AdapterConfig a;
            const auto& aj = v["adapter"];
            if (aj.contains("transport")) {
                const std::string t = aj["transport"].get<std::string>();
                if (t == "http") a.transport = AdapterConfig::Transport::http;
                else if (t == "subprocess") a.transport = AdapterConfig::Transport::subprocess;
                else fail(ErrorCode::BadRecord, "adapter.transport must be subprocess or http");
            }
            if (aj.contains("command")) a.command = aj["command"].get<std::vector<std::string>>();
            if (aj.contains("url")) a.url = aj["url"].get<std::string>();
            if (aj.contains("timeout_s")) a.timeout_s = aj["timeout_s"].get<double>();
            c.conversation.adapter = std::move(a);
        }
    }
    if (doc.contains("report")) {
        const auto& r = doc["report"];
        if (r.contains("include_self")) c.report.include_self = r["include_self"].get<bool>();
        if (r.contains("exclude_unknown_state")) {
            c.report.exclude_unknown_state = r["exclude_unknown_state"].get<bool>();
        }
        if (r.contains("team_score")) c.report.team_score = r["team_score"].get<std::string>();
        if (r.contains("ottawa_score")) c.report.ottawa_score = r["ottawa_score"].get<std::string>();
    }
    if (doc.contains("tie_break") && doc["tie_break"].contains("category_priority")) {
        c.tie_break.category_priority =
            doc["tie_break"]["category_priority"].get<std::vector<std::string>>();
    }
    if (doc.contains("label_priority")) c.label_priority = doc["label_priority"].get<std::vector<int>>();
    if (doc.contains("enable_eye_contact")) c.enable_eye_contact = doc["enable_eye_contact"].get<bool>();
    if (doc.contains("enable_conversation")) c.enable_conversation = doc["enable_conversation"].get<bool>();
    if (doc.contains("emit_run_metadata")) c.emit_run_metadata = doc["emit_run_metadata"].get<bool>();
    return c;
}

AnalysisConfig load_analysis_config(const std::filesystem::path& path) {
    return analysis_config_from_json(read_json_file(path));
}

SessionOutputs AnalysisResult::to_outputs() const {
    SessionOutputs outputs;
    outputs.session_id = manifest.session_id;
    if (timeline) outputs.events = timeline->events;
    if (assignments) outputs.assignments = *assignments;
    if (eye_contact) {
        for (const auto& dyad : eye_contact->dyads) {
            outputs.ec_counts[dyad.member_id] = static_cast<int>(dyad.events.size());
        }
    }
    if (utterances) outputs.utterances = *utterances;
    if (report.transition) outputs.transition = report.transition;
    return outputs;
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& rel) {
    const std::filesystem::path p(rel);
    return p.is_absolute() ? p : base / p;
}

} // namespace

AnalysisResult run_analysis(const std::filesystem::path& manifest_path,
                            const AnalysisConfig& config) {
    AnalysisResult result;
    result.manifest = parse_manifest(manifest_path);
    const std::filesystem::path base = manifest_path.parent_path();
    const SessionManifest& manifest = result.manifest;
    const WearerEntry& leader = manifest.leader();
    const TimeNs align_tol = ms_to_ns(config.alignment_tolerance_ms);

    // Leader gaze and event timeline.
    std::optional<LabelSource> labels;
    if (leader.gaze_path) {
        result.leader_track = load_gaze_track(resolve(base, *leader.gaze_path), config.stream,
                                              leader.clock_offset_ns, leader.wearer_id);
        result.timeline = classify_events(*result.leader_track, config.classifier);

        if (leader.labelmap_path) {
            labels = load_label_source(resolve(base, *leader.labelmap_path), manifest.category_map,
                                       leader.clock_offset_ns, config.label_priority);
            const FramedGaze framed =
                align_to_frames(*result.leader_track, labels->frame_times(), align_tol);
            result.assignments = assign_all(*result.timeline, *labels, framed,
                                            *result.leader_track, manifest.category_map,
                                            config.tie_break);
        } else {
            result.warnings.push_back("no label maps for leader; fixation objects skipped");
        }
    } else {
        result.warnings.push_back("no gaze stream for leader; event analysis skipped");
    }

    // Eye contact.
    std::optional<FaceTrackSet> leader_faces;
    std::vector<std::pair<FaceTrackSet, GazeTrack>> member_streams;
    if (config.enable_eye_contact && result.leader_track && leader.facetrack_path) {
        leader_faces = load_face_tracks(resolve(base, *leader.facetrack_path), leader.wearer_id,
                                        leader.clock_offset_ns);
        for (const WearerEntry* member : manifest.members()) {
            if (!member->facetrack_path || !member->gaze_path) continue;
            FaceTrackSet faces = load_face_tracks(resolve(base, *member->facetrack_path),
                                                  member->wearer_id, member->clock_offset_ns);
            GazeTrack track = load_gaze_track(resolve(base, *member->gaze_path), config.stream,
                                              member->clock_offset_ns, member->wearer_id);
            member_streams.emplace_back(std::move(faces), std::move(track));
        }
        if (!member_streams.empty()) {
            EcStreams leader_streams;
            leader_streams.wearer_id = leader.wearer_id;
            leader_streams.faces = &*leader_faces;
            leader_streams.track = &*result.leader_track;
            leader_streams.framed =
                align_to_frames(*result.leader_track, leader_faces->frame_times(), align_tol);

            std::vector<EcStreams> members;
            members.reserve(member_streams.size());
            for (auto& [faces, track] : member_streams) {
                EcStreams ms;
                ms.wearer_id = faces.video_owner;
                ms.faces = &faces;
                ms.track = &track;
                ms.framed = align_to_frames(track, faces.frame_times(), align_tol);
                members.push_back(std::move(ms));
            }
            result.eye_contact = count_eye_contact(leader_streams, members, config.eye_contact);
        } else {
            result.warnings.push_back("eye contact enabled but no member has face tracks + gaze");
        }
    } else if (config.enable_eye_contact && result.leader_track) {
        result.warnings.push_back("eye contact enabled but leader has no face tracks");
    }

    // Conversation.
    if (config.enable_conversation && leader.transcript_path) {
        auto utts = load_transcript(resolve(base, *leader.transcript_path), leader.clock_offset_ns);
        if (config.conversation.mode == ConversationConfig::Mode::rule) {
            const RuleSet rules = builtin_rules(config.conversation.language);
            for (auto& u : utts) {
                if (!u.label) u = classify_rule(u, rules);
            }
        } else if (config.conversation.mode == ConversationConfig::Mode::external) {
            if (!config.conversation.adapter) {
                fail(ErrorCode::AdapterUnreachable, "external mode without adapter config");
            }
            std::vector<std::size_t> pending;
            std::vector<Utterance> batch;
            for (std::size_t i = 0; i < utts.size(); ++i) {
                if (!utts[i].label) {
                    pending.push_back(i);
                    batch.push_back(utts[i]);
                }
            }
            const auto labeled = classify_external(batch, *config.conversation.adapter);
            for (std::size_t k = 0; k < pending.size(); ++k) utts[pending[k]] = labeled[k];
        }
        bool leader_spoke = false;
        for (const auto& u : utts) leader_spoke |= u.speaker == manifest.leader_id;
        if (leader_spoke) {
            result.conv_ratios = category_ratios(utts, manifest.leader_id);
            result.utterances = std::move(utts);
        } else {
            result.warnings.push_back("transcript has no leader utterances; ratios skipped");
        }
    }

    // Report.
    ReportInputs inputs;
    inputs.session_id = manifest.session_id;
    inputs.leader_id = manifest.leader_id;
    inputs.category_states = manifest.category_order();
    inputs.assignments = result.assignments ? &*result.assignments : nullptr;
    inputs.eye_contact = result.eye_contact ? &*result.eye_contact : nullptr;
    inputs.conv_ratios = result.conv_ratios ? &*result.conv_ratios : nullptr;
    inputs.team_score = config.report.team_score;
    inputs.ottawa_score = config.report.ottawa_score;
    inputs.include_self = config.report.include_self;
    inputs.exclude_unknown_state = config.report.exclude_unknown_state;
    inputs.params = analysis_config_to_json(config);
    result.report = assemble_report(inputs);
    return result;
}

void write_outputs(const AnalysisResult& result, const AnalysisConfig& config,
                   const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_json_file(out_dir / "report.json", report_to_json(result.report));
    {
        std::ofstream md(out_dir / "report.md", std::ios::binary);
        md << report_to_markdown(result.report);
    }
    if (result.report.transition) {
        std::ofstream csv(out_dir / "transition.csv", std::ios::binary);
        csv << transition_to_csv(*result.report.transition);
    }
    if (result.timeline) {
        write_jsonl(out_dir / "timeline.jsonl", timeline_to_jsonl(*result.timeline));
        write_json_file(out_dir / "classifier_params.json",
                        classifier_params_to_json(result.timeline->params_used));
    }
    if (result.assignments) {
        write_jsonl(out_dir / "assignments.jsonl", assignments_to_jsonl(*result.assignments));
    }
    if (result.eye_contact) {
        std::vector<EyeContactEvent> all_events;
        for (const auto& dyad : result.eye_contact->dyads) {
            all_events.insert(all_events.end(), dyad.events.begin(), dyad.events.end());
        }
        std::sort(all_events.begin(), all_events.end(),
                  [](const EyeContactEvent& a, const EyeContactEvent& b) {
                      return a.start_ns != b.start_ns ? a.start_ns < b.start_ns
                                                      : a.member_id < b.member_id;
                  });
        write_jsonl(out_dir / "ec_events.jsonl", ec_events_to_jsonl(all_events));
    }
    if (result.utterances) {
        write_jsonl(out_dir / "utterances.jsonl", utterances_to_jsonl(*result.utterances));
    }
    if (config.emit_run_metadata) {
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        write_json_file(out_dir / "run_metadata.json",
                        Json{{"wall_clock_ns",
                              std::chrono::duration_cast<std::chrono::nanoseconds>(now).count()}});
    }
}

std::vector<Violation> validate_session(const std::filesystem::path& manifest_path,
                                        const AnalysisConfig& config) {
    std::vector<Violation> violations;
    const auto record = [&violations](const std::string& file, const Error& e) {
        violations.push_back({file, error_name(e.code()), e.detail()});
    };

    SessionManifest manifest;
    try {
        manifest = parse_manifest(manifest_path);
    } catch (const Error& e) {
        record(manifest_path.string(), e);
        return violations;
    }

    const std::filesystem::path base = manifest_path.parent_path();
    for (const auto& w : manifest.wearers) {
        if (w.gaze_path) {
            try {
                load_gaze_track(resolve(base, *w.gaze_path), config.stream, w.clock_offset_ns,
                                w.wearer_id);
            } catch (const Error& e) {
                record(*w.gaze_path, e);
            }
        }
        if (w.labelmap_path) {
            try {
                load_label_source(resolve(base, *w.labelmap_path), manifest.category_map,
                                  w.clock_offset_ns, config.label_priority);
            } catch (const Error& e) {
                record(*w.labelmap_path, e);
            }
        }
        if (w.facetrack_path) {
            try {
                load_face_tracks(resolve(base, *w.facetrack_path), w.wearer_id, w.clock_offset_ns);
            } catch (const Error& e) {
                record(*w.facetrack_path, e);
            }
        }
        if (w.transcript_path) {
            try {
                load_transcript(resolve(base, *w.transcript_path), w.clock_offset_ns);
            } catch (const Error& e) {
                record(*w.transcript_path, e);
            }
        }
    }
    return violations;
}

SessionOutputs load_outputs(const std::filesystem::path& analysis_dir) {
    const auto report_path = analysis_dir / "report.json";
    if (!std::filesystem::exists(report_path)) {
        fail(ErrorCode::MissingAnalysis, report_path.string());
    }
    const LeadershipReport report = report_from_json(read_json_file(report_path));

    SessionOutputs outputs;
    outputs.session_id = report.session_id;
    outputs.transition = report.transition;
    if (report.ec_per_dyad) outputs.ec_counts = *report.ec_per_dyad;

    const auto timeline_path = analysis_dir / "timeline.jsonl";
    if (std::filesystem::exists(timeline_path)) {
        std::vector<Json> records;
        for (auto& rec : read_jsonl(timeline_path)) records.push_back(std::move(rec.value));
        outputs.events = timeline_events_from_jsonl(records);
    }
    const auto assignments_path = analysis_dir / "assignments.jsonl";
    if (std::filesystem::exists(assignments_path)) {
        std::vector<Json> records;
        for (auto& rec : read_jsonl(assignments_path)) records.push_back(std::move(rec.value));
        outputs.assignments = assignments_from_jsonl(records);
    }
    const auto utts_path = analysis_dir / "utterances.jsonl";
    if (std::filesystem::exists(utts_path)) {
        for (const auto& rec : read_jsonl(utts_path)) {
            Utterance u;
            u.start_ns = rec.value.at("start_ns").get<TimeNs>();
            u.end_ns = rec.value.at("end_ns").get<TimeNs>();
            u.speaker = rec.value.at("speaker").get<std::string>();
            u.text = rec.value.at("text").get<std::string>();
            if (rec.value.contains("label")) {
                u.label = intent_from_string(rec.value.at("label").get<std::string>());
            }
            outputs.utterances.push_back(std::move(u));
        }
    }
    return outputs;
}

void export_overlay(const std::filesystem::path& manifest_path, const AnalysisConfig& config,
                    const std::filesystem::path& analysis_dir,
                    const std::filesystem::path& out_path) {
    const SessionManifest manifest = parse_manifest(manifest_path);
    const std::filesystem::path base = manifest_path.parent_path();
    const WearerEntry& leader = manifest.leader();

    const SessionOutputs outputs = load_outputs(analysis_dir);
    if (outputs.events.empty()) {
        fail(ErrorCode::MissingAnalysis, "timeline.jsonl missing or empty in " + analysis_dir.string());
    }
    std::vector<EyeContactEvent> ec_events;
    const auto ec_path = analysis_dir / "ec_events.jsonl";
    if (std::filesystem::exists(ec_path)) {
        std::vector<Json> records;
        for (auto& rec : read_jsonl(ec_path)) records.push_back(std::move(rec.value));
        ec_events = ec_events_from_jsonl(records);
    }

    // Frame grid: label maps when present, face tracks otherwise.
    std::vector<std::pair<int, TimeNs>> frames;
    if (leader.labelmap_path) {
        const LabelSource labels =
            load_label_source(resolve(base, *leader.labelmap_path), manifest.category_map,
                              leader.clock_offset_ns, config.label_priority);
        const auto times = labels.frame_times();
        for (std::size_t i = 0; i < labels.frame_count(); ++i) {
            frames.emplace_back(labels.frame_idx_at(i), times[i]);
        }
    } else if (leader.facetrack_path) {
        const FaceTrackSet faces = load_face_tracks(resolve(base, *leader.facetrack_path),
                                                    leader.wearer_id, leader.clock_offset_ns);
        for (const auto& f : faces.frames) frames.emplace_back(f.frame_idx, f.t_ns);
    } else {
        fail(ErrorCode::MissingAnalysis, "leader has no frame-indexed stream for the overlay");
    }

    if (!leader.gaze_path) fail(ErrorCode::MissingAnalysis, "leader has no gaze stream");
    const GazeTrack track = load_gaze_track(resolve(base, *leader.gaze_path), config.stream,
                                            leader.clock_offset_ns, leader.wearer_id);
    std::vector<TimeNs> frame_times;
    frame_times.reserve(frames.size());
    for (const auto& [idx, t] : frames) frame_times.push_back(t);
    const FramedGaze framed =
        align_to_frames(track, frame_times, ms_to_ns(config.alignment_tolerance_ms));

    std::vector<Json> records;
    records.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const TimeNs t = frames[i].second;
        Json rec;
        rec["frame_idx"] = frames[i].first;
        rec["t_ns"] = t;

        if (framed.sample_index[i]) {
            const GazeSample& s = track.samples[*framed.sample_index[i]];
            rec["gaze"] = Json{{"x", s.x}, {"y", s.y}};
        } else {
            rec["gaze"] = nullptr;
        }

        rec["kind"] = nullptr;
        for (const auto& ev : outputs.events) {
            if (ev.contains(t)) {
                rec["kind"] = event_kind_name(ev.kind);
                break;
            }
        }

        rec["category"] = nullptr;
        rec["object_id"] = nullptr;
        for (const auto& a : outputs.assignments) {
            if (t >= a.start_ns && t < a.end_ns) {
                rec["category"] = a.category;
                rec["object_id"] = a.object_id;
                break;
            }
        }

        bool ec = false;
        for (const auto& ev : ec_events) {
            if (t >= ev.start_ns && t <= ev.end_ns) {
                ec = true;
                break;
            }
        }
        rec["ec"] = ec;

        rec["utterance_label"] = nullptr;
        for (const auto& u : outputs.utterances) {
            if (u.speaker != manifest.leader_id) continue;
            if (t >= u.start_ns && t < u.end_ns) {
                rec["utterance_label"] = intent_name(u.label.value_or(IntentLabel::NONE));
                break;
            }
        }
        records.push_back(std::move(rec));
    }
    write_jsonl(out_path, records);
}

} // namespace teamlens
