#include "teamlens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "teamlens/error.hpp"
#include "teamlens/manifest.hpp"
#include "teamlens/rng.hpp"

namespace teamlens {

namespace {

const char* segment_kind_name(SynthSegment::Kind kind) {
    switch (kind) {
    case SynthSegment::Kind::gap: return "gap";
    case SynthSegment::Kind::fixation: return "fixation";
    case SynthSegment::Kind::saccade: return "saccade";
    case SynthSegment::Kind::mutual_gaze: return "mutual_gaze";
    case SynthSegment::Kind::utterance: return "utterance";
    }
    return "gap";
}

SynthSegment::Kind parse_segment_kind(const std::string& name) {
    if (name == "gap") return SynthSegment::Kind::gap;
    if (name == "fixation") return SynthSegment::Kind::fixation;
    if (name == "saccade") return SynthSegment::Kind::saccade;
    if (name == "mutual_gaze") return SynthSegment::Kind::mutual_gaze;
    if (name == "utterance") return SynthSegment::Kind::utterance;
    fail(ErrorCode::BadRecord, "unknown script segment kind \"" + name + "\"");
}

} // namespace

SynthSpec synth_spec_from_json(const Json& doc) {
    SynthSpec spec;
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("session_id")) spec.session_id = doc["session_id"].get<std::string>();
    if (doc.contains("duration_s")) spec.duration_s = doc["duration_s"].get<double>();
    if (doc.contains("gaze_rate_hz")) spec.gaze_rate_hz = doc["gaze_rate_hz"].get<double>();
    if (doc.contains("frame_rate_hz")) spec.frame_rate_hz = doc["frame_rate_hz"].get<double>();
    if (doc.contains("width")) spec.width = doc["width"].get<int>();
    if (doc.contains("height")) spec.height = doc["height"].get<int>();
    if (doc.contains("noise_px")) spec.noise_px = doc["noise_px"].get<double>();
    if (doc.contains("leader_id")) spec.leader_id = doc["leader_id"].get<std::string>();
    if (doc.contains("members")) spec.members = doc["members"].get<std::vector<std::string>>();
    if (doc.contains("raster_labels")) spec.raster_labels = doc["raster_labels"].get<bool>();
    if (doc.contains("member_rest_point")) {
        spec.member_rest_point = {doc["member_rest_point"][0].get<double>(),
                                  doc["member_rest_point"][1].get<double>()};
    }
    if (doc.contains("scene")) {
        spec.scene.clear();
        for (const auto& oj : doc["scene"]) {
            SceneObject obj;
            obj.object_id = oj.at("object_id").get<int>();
            obj.category = oj.at("category").get<std::string>();
            obj.x0 = oj.at("x0").get<double>();
            obj.y0 = oj.at("y0").get<double>();
            obj.x1 = oj.at("x1").get<double>();
            obj.y1 = oj.at("y1").get<double>();
            if (oj.contains("wearer")) obj.wearer = oj["wearer"].get<std::string>();
            spec.scene.push_back(obj);
        }
    }
    if (doc.contains("leader_face")) {
        const auto& fj = doc["leader_face"];
        spec.leader_face.x0 = fj.at("x0").get<double>();
        spec.leader_face.y0 = fj.at("y0").get<double>();
        spec.leader_face.x1 = fj.at("x1").get<double>();
        spec.leader_face.y1 = fj.at("y1").get<double>();
    }
    if (doc.contains("script")) {
        for (const auto& sj : doc["script"]) {
            SynthSegment seg;
            seg.kind = parse_segment_kind(sj.at("kind").get<std::string>());
            if (sj.contains("duration_s")) seg.duration_s = sj["duration_s"].get<double>();
            if (sj.contains("object_id")) seg.object_id = sj["object_id"].get<int>();
            if (sj.contains("point")) seg.point = {sj["point"][0].get<double>(), sj["point"][1].get<double>()};
            if (sj.contains("member")) seg.member = sj["member"].get<std::string>();
            if (sj.contains("speaker")) seg.speaker = sj["speaker"].get<std::string>();
            if (sj.contains("text")) seg.text = sj["text"].get<std::string>();
            if (sj.contains("label")) {
                seg.label = intent_from_string(sj["label"].get<std::string>());
                if (!seg.label) fail(ErrorCode::BadRecord, "unknown utterance label in script");
            }
            spec.script.push_back(std::move(seg));
        }
    }
    return spec;
}

Json synth_spec_to_json(const SynthSpec& spec) {
    Json scene = Json::array();
    for (const auto& obj : spec.scene) {
        Json oj = {{"object_id", obj.object_id}, {"category", obj.category},
                   {"x0", obj.x0}, {"y0", obj.y0}, {"x1", obj.x1}, {"y1", obj.y1}};
        if (!obj.wearer.empty()) oj["wearer"] = obj.wearer;
        scene.push_back(std::move(oj));
    }
    Json script = Json::array();
    for (const auto& seg : spec.script) {
        Json sj = {{"kind", segment_kind_name(seg.kind)}};
        if (seg.duration_s > 0) sj["duration_s"] = seg.duration_s;
        if (seg.object_id != 0) sj["object_id"] = seg.object_id;
        if (seg.point) sj["point"] = Json::array({seg.point->first, seg.point->second});
        if (!seg.member.empty()) sj["member"] = seg.member;
        if (!seg.speaker.empty()) sj["speaker"] = seg.speaker;
        if (!seg.text.empty()) sj["text"] = seg.text;
        if (seg.label) sj["label"] = intent_name(*seg.label);
        script.push_back(std::move(sj));
    }
    return Json{
        {"seed", spec.seed},
        {"session_id", spec.session_id},
        {"duration_s", spec.duration_s},
        {"gaze_rate_hz", spec.gaze_rate_hz},
        {"frame_rate_hz", spec.frame_rate_hz},
        {"width", spec.width},
        {"height", spec.height},
        {"noise_px", spec.noise_px},
        {"leader_id", spec.leader_id},
        {"members", spec.members},
        {"raster_labels", spec.raster_labels},
        {"member_rest_point", Json::array({spec.member_rest_point.first, spec.member_rest_point.second})},
        {"scene", scene},
        {"leader_face", Json{{"x0", spec.leader_face.x0}, {"y0", spec.leader_face.y0},
                             {"x1", spec.leader_face.x1}, {"y1", spec.leader_face.y1}}},
        {"script", script},
    };
}

Json ground_truth_to_json(const GroundTruth& truth) {
    Json events = Json::array();
    for (const auto& ev : truth.events) {
        events.push_back(Json{{"kind", static_cast<int>(ev.kind)},
                              {"start_ns", ev.start_ns},
                              {"end_ns", ev.end_ns},
                              {"object_id", ev.object_id},
                              {"category", ev.category}});
    }
    Json ec = Json::array();
    for (const auto& w : truth.eye_contact) {
        ec.push_back(Json{{"member", w.member}, {"start_ns", w.start_ns}, {"end_ns", w.end_ns}});
    }
    return Json{
        {"session_id", truth.session_id},
        {"leader_id", truth.leader_id},
        {"events", events},
        {"eye_contact", ec},
        {"utterances", utterances_to_jsonl(truth.utterances)},
        {"category_sequence", truth.category_sequence},
    };
}

GroundTruth ground_truth_from_json(const Json& doc) {
    GroundTruth truth;
    truth.session_id = doc.at("session_id").get<std::string>();
    truth.leader_id = doc.at("leader_id").get<std::string>();
    for (const auto& ej : doc.at("events")) {
        TruthEvent ev;
        ev.kind = parse_event_kind(ej.at("kind").get<int>());
        ev.start_ns = ej.at("start_ns").get<TimeNs>();
        ev.end_ns = ej.at("end_ns").get<TimeNs>();
        ev.object_id = ej.at("object_id").get<int>();
        ev.category = ej.at("category").get<std::string>();
        truth.events.push_back(std::move(ev));
    }
    for (const auto& wj : doc.at("eye_contact")) {
        truth.eye_contact.push_back({wj.at("member").get<std::string>(),
                                     wj.at("start_ns").get<TimeNs>(),
                                     wj.at("end_ns").get<TimeNs>()});
    }
    for (const auto& uj : doc.at("utterances")) {
        Utterance u;
        u.start_ns = uj.at("start_ns").get<TimeNs>();
        u.end_ns = uj.at("end_ns").get<TimeNs>();
        u.speaker = uj.at("speaker").get<std::string>();
        u.text = uj.at("text").get<std::string>();
        if (uj.contains("label")) {
            u.label = intent_from_string(uj.at("label").get<std::string>());
            u.label_source = LabelSource_::annotation;
        }
        truth.utterances.push_back(std::move(u));
    }
    truth.category_sequence = doc.at("category_sequence").get<std::vector<std::string>>();
    return truth;
}

namespace {

struct GazeInterval {
    SynthSegment::Kind kind = SynthSegment::Kind::gap;
    TimeNs start_ns = 0;
    TimeNs end_ns = 0;
    double x0 = 0, y0 = 0; // position at start (saccade: motion origin)
    double x1 = 0, y1 = 0; // position at end (saccade: motion target)
    int object_id = 0;
    std::string category;
    std::string member;
};

const SceneObject* find_object(const SynthSpec& spec, int object_id) {
    for (const auto& obj : spec.scene) {
        if (obj.object_id == object_id) return &obj;
    }
    return nullptr;
}

const SceneObject* find_member_box(const SynthSpec& spec, const std::string& member) {
    for (const auto& obj : spec.scene) {
        if (obj.wearer == member) return &obj;
    }
    return nullptr;
}

} // namespace

GroundTruth generate_session(const SynthSpec& spec, const std::filesystem::path& out_dir) {
    if (spec.duration_s <= 0) fail(ErrorCode::InfeasibleScript, "duration_s must be > 0");
    if (spec.gaze_rate_hz <= 0 || spec.frame_rate_hz <= 0) {
        fail(ErrorCode::InfeasibleScript, "rates must be > 0");
    }
    std::filesystem::create_directories(out_dir);

    const TimeNs duration_ns = sec_to_ns(spec.duration_s);
    const TimeNs gaze_period = static_cast<TimeNs>(std::llround(1e9 / spec.gaze_rate_hz));
    const TimeNs frame_period = static_cast<TimeNs>(std::llround(1e9 / spec.frame_rate_hz));

    // Resolve the script into leader gaze intervals plus the speech track.
    struct Pending {
        const SynthSegment* seg;
        double px = 0, py = 0; // target position (fixation/mutual)
        bool positioned = false;
    };
    std::vector<Pending> gaze_script;
    std::vector<const SynthSegment*> speech_script;
    for (const auto& seg : spec.script) {
        if (seg.duration_s < 0) fail(ErrorCode::InfeasibleScript, "negative segment duration");
        if (seg.kind == SynthSegment::Kind::utterance) {
            speech_script.push_back(&seg);
            continue;
        }
        Pending p{&seg};
        if (seg.kind == SynthSegment::Kind::fixation) {
            if (seg.point) {
                p.px = seg.point->first;
                p.py = seg.point->second;
            } else {
                const SceneObject* obj = find_object(spec, seg.object_id);
                if (!obj) {
                    fail(ErrorCode::InfeasibleScript,
                         "fixation on unknown object " + std::to_string(seg.object_id));
                }
                p.px = obj->cx();
                p.py = obj->cy();
            }
            p.positioned = true;
        } else if (seg.kind == SynthSegment::Kind::mutual_gaze) {
            const SceneObject* box = find_member_box(spec, seg.member);
            if (!box) {
                fail(ErrorCode::InfeasibleScript, "mutual_gaze with unknown member \"" + seg.member + "\"");
            }
            p.px = box->cx();
            p.py = box->cy();
            p.positioned = true;
        }
        gaze_script.push_back(p);
    }

    std::vector<GazeInterval> intervals;
    TimeNs cursor = 0;
    double cur_x = static_cast<double>(spec.width) / 2;
    double cur_y = static_cast<double>(spec.height) / 2;
    for (std::size_t i = 0; i < gaze_script.size(); ++i) {
        const Pending& p = gaze_script[i];
        GazeInterval iv;
        iv.kind = p.seg->kind;
        iv.start_ns = cursor;
        if (p.seg->kind == SynthSegment::Kind::saccade) {
            if (i + 1 >= gaze_script.size() || !gaze_script[i + 1].positioned) {
                fail(ErrorCode::InfeasibleScript, "saccade must be followed by a positioned segment");
            }
            iv.x0 = cur_x;
            iv.y0 = cur_y;
            iv.x1 = gaze_script[i + 1].px;
            iv.y1 = gaze_script[i + 1].py;
            double dur = p.seg->duration_s;
            if (dur <= 0) {
                dur = std::hypot(iv.x1 - iv.x0, iv.y1 - iv.y0) / 600.0; // default jump speed
            }
            iv.end_ns = cursor + sec_to_ns(dur);
        } else {
            if (p.positioned) {
                cur_x = p.px;
                cur_y = p.py;
            }
            iv.x0 = iv.x1 = cur_x;
            iv.y0 = iv.y1 = cur_y;
            iv.end_ns = cursor + sec_to_ns(p.seg->duration_s);
            if (p.seg->kind == SynthSegment::Kind::fixation) {
                iv.object_id = p.seg->object_id;
                const SceneObject* obj =
                    p.seg->point ? nullptr : find_object(spec, p.seg->object_id);
                iv.category = obj ? obj->category : kUnknownCategory;
            } else if (p.seg->kind == SynthSegment::Kind::mutual_gaze) {
                const SceneObject* box = find_member_box(spec, p.seg->member);
                iv.object_id = box->object_id;
                iv.category = box->category;
                iv.member = p.seg->member;
            }
        }
        if (p.seg->kind == SynthSegment::Kind::saccade) {
            cur_x = iv.x1;
            cur_y = iv.y1;
        }
        cursor = iv.end_ns;
        if (cursor > duration_ns) fail(ErrorCode::InfeasibleScript, "script exceeds duration_s");
        intervals.push_back(std::move(iv));
    }
    if (cursor < duration_ns) {
        GazeInterval pad;
        pad.kind = SynthSegment::Kind::gap;
        pad.start_ns = cursor;
        pad.end_ns = duration_ns;
        intervals.push_back(pad);
    }

    // Ground truth events mirror the intervals.
    GroundTruth truth;
    truth.session_id = spec.session_id;
    truth.leader_id = spec.leader_id;
    for (const auto& iv : intervals) {
        TruthEvent ev;
        ev.start_ns = iv.start_ns;
        ev.end_ns = iv.end_ns;
        switch (iv.kind) {
        case SynthSegment::Kind::fixation:
        case SynthSegment::Kind::mutual_gaze:
            ev.kind = EventKind::fixation;
            ev.object_id = iv.object_id;
            ev.category = iv.category;
            truth.category_sequence.push_back(iv.category);
            break;
        case SynthSegment::Kind::saccade:
            ev.kind = EventKind::saccade;
            break;
        default:
            ev.kind = EventKind::other;
            break;
        }
        truth.events.push_back(std::move(ev));
        if (iv.kind == SynthSegment::Kind::mutual_gaze) {
            truth.eye_contact.push_back({iv.member, iv.start_ns, iv.end_ns});
        }
    }

    // Wearer clock offsets: nonzero so ingestion has real work to do.
    std::vector<std::string> wearer_ids = {spec.leader_id};
    for (const auto& m : spec.members) wearer_ids.push_back(m);
    std::map<std::string, TimeNs> offsets;
    for (std::size_t i = 0; i < wearer_ids.size(); ++i) {
        offsets[wearer_ids[i]] = static_cast<TimeNs>(i + 1) * 37 * kNsPerMs;
    }

    const auto interval_at = [&intervals](TimeNs t) -> const GazeInterval* {
        for (const auto& iv : intervals) {
            if (t >= iv.start_ns && t < iv.end_ns) return &iv;
        }
        return nullptr;
    };

    // Leader gaze stream.
    {
        SplitMix64 rng(spec.seed);
        std::vector<Json> records;
        for (TimeNs t = 0; t < duration_ns; t += gaze_period) {
            const GazeInterval* iv = interval_at(t);
            Json rec;
            if (!iv || iv->kind == SynthSegment::Kind::gap) {
                rec = {{"t_ns", t - offsets[spec.leader_id]}, {"x", -1.0}, {"y", -1.0}};
            } else {
                double x, y;
                if (iv->kind == SynthSegment::Kind::saccade) {
                    const double f = static_cast<double>(t - iv->start_ns) /
                                     static_cast<double>(iv->end_ns - iv->start_ns);
                    x = iv->x0 + (iv->x1 - iv->x0) * f;
                    y = iv->y0 + (iv->y1 - iv->y0) * f;
                } else {
                    x = iv->x0;
                    y = iv->y0;
                }
                if (spec.noise_px > 0) {
                    x += spec.noise_px * rng.next_gaussian();
                    y += spec.noise_px * rng.next_gaussian();
                }
                x = std::clamp(x, 0.0, static_cast<double>(spec.width));
                y = std::clamp(y, 0.0, static_cast<double>(spec.height));
                rec = {{"t_ns", t - offsets[spec.leader_id]}, {"x", x}, {"y", y}, {"conf", 1.0}};
            }
            records.push_back(std::move(rec));
        }
        write_jsonl(out_dir / ("gaze_" + spec.leader_id + ".jsonl"), records);
    }

    // Member gaze streams: resting off the leader's face except inside
    // mutual windows (padded 50 ms each side so frame pairing at the window
    // edges cannot break the conjunction).
    const TimeNs mutual_slack = 50 * kNsPerMs;
    for (std::size_t mi = 0; mi < spec.members.size(); ++mi) {
        const std::string& member = spec.members[mi];
        SplitMix64 rng(spec.seed * 1000003ULL + mi + 1);
        std::vector<std::pair<TimeNs, TimeNs>> windows;
        for (const auto& w : truth.eye_contact) {
            if (w.member == member) {
                windows.emplace_back(w.start_ns - mutual_slack, w.end_ns + mutual_slack);
            }
        }
        const double face_cx = spec.leader_face.cx();
        const double face_cy = spec.leader_face.cy();
        std::vector<Json> records;
        for (TimeNs t = 0; t < duration_ns; t += gaze_period) {
            bool in_window = false;
            for (const auto& [a, b] : windows) {
                if (t >= a && t < b) {
                    in_window = true;
                    break;
                }
            }
            double x = in_window ? face_cx : spec.member_rest_point.first;
            double y = in_window ? face_cy : spec.member_rest_point.second;
            if (spec.noise_px > 0) {
                x += spec.noise_px * rng.next_gaussian();
                y += spec.noise_px * rng.next_gaussian();
            }
            x = std::clamp(x, 0.0, static_cast<double>(spec.width));
            y = std::clamp(y, 0.0, static_cast<double>(spec.height));
            records.push_back(Json{{"t_ns", t - offsets[member]}, {"x", x}, {"y", y}, {"conf", 1.0}});
        }
        write_jsonl(out_dir / ("gaze_" + member + ".jsonl"), records);
    }

    // Leader label maps (scene geometry is static).
    {
        std::vector<int> priority;
        for (const auto& obj : spec.scene) priority.push_back(obj.object_id);
        std::sort(priority.begin(), priority.end());
        std::vector<ObjectBox> boxes;
        for (const auto& obj : spec.scene) {
            boxes.push_back({obj.object_id, obj.x0, obj.y0, obj.x1, obj.y1});
        }
        std::vector<Json> records;
        int frame_idx = 0;
        for (TimeNs t = 0; t < duration_ns; t += frame_period, ++frame_idx) {
            if (spec.raster_labels) {
                LabelFrame frame = render_raster_frame(frame_idx, t - offsets[spec.leader_id],
                                                       spec.width, spec.height, boxes, priority);
                records.push_back(label_frame_to_json(frame));
            } else {
                BoxFrame frame;
                frame.frame_idx = frame_idx;
                frame.t_ns = t - offsets[spec.leader_id];
                frame.boxes = boxes;
                records.push_back(box_frame_to_json(frame));
            }
        }
        write_jsonl(out_dir / ("labelmaps_" + spec.leader_id + ".jsonl"), records);
    }

    // Face tracks: members' faces in the leader's video, the leader's face in
    // each member's video.
    {
        std::vector<Json> records;
        int frame_idx = 0;
        for (TimeNs t = 0; t < duration_ns; t += frame_period, ++frame_idx) {
            Json boxes = Json::array();
            for (const auto& obj : spec.scene) {
                if (obj.wearer.empty()) continue;
                boxes.push_back(Json{{"person_id", obj.wearer},
                                     {"x0", obj.x0},
                                     {"y0", obj.y0},
                                     {"x1", obj.x1},
                                     {"y1", obj.y1},
                                     {"conf", 1.0}});
            }
            records.push_back(Json{
                {"frame_idx", frame_idx}, {"t_ns", t - offsets[spec.leader_id]}, {"boxes", boxes}});
        }
        write_jsonl(out_dir / ("facetracks_" + spec.leader_id + ".jsonl"), records);
    }
    for (const auto& member : spec.members) {
        std::vector<Json> records;
        int frame_idx = 0;
        for (TimeNs t = 0; t < duration_ns; t += frame_period, ++frame_idx) {
            Json boxes = Json::array({Json{{"person_id", spec.leader_id},
                                           {"x0", spec.leader_face.x0},
                                           {"y0", spec.leader_face.y0},
                                           {"x1", spec.leader_face.x1},
                                           {"y1", spec.leader_face.y1},
                                           {"conf", 1.0}}});
            records.push_back(
                Json{{"frame_idx", frame_idx}, {"t_ns", t - offsets[member]}, {"boxes", boxes}});
        }
        write_jsonl(out_dir / ("facetracks_" + member + ".jsonl"), records);
    }

    // Transcript (device clock of the leader, who carries the recorder).
    {
        TimeNs speech_cursor = 0;
        std::vector<Json> records;
        for (const SynthSegment* seg : speech_script) {
            const TimeNs start = speech_cursor;
            const TimeNs end = start + sec_to_ns(seg->duration_s);
            speech_cursor = end;
            Utterance u;
            u.start_ns = start;
            u.end_ns = end;
            u.speaker = seg->speaker.empty() ? spec.leader_id : seg->speaker;
            u.text = seg->text;
            u.label = seg->label;
            if (seg->label) u.label_source = LabelSource_::annotation;
            truth.utterances.push_back(u);

            Json rec = {{"start_ns", start - offsets[spec.leader_id]},
                        {"end_ns", end - offsets[spec.leader_id]},
                        {"speaker", u.speaker},
                        {"text", u.text}};
            if (u.label) rec["label"] = intent_name(*u.label);
            records.push_back(std::move(rec));
        }
        write_jsonl(out_dir / "transcript.jsonl", records);
    }

    // Manifest.
    {
        SessionManifest manifest;
        manifest.session_id = spec.session_id;
        manifest.epoch_ns = 0;
        manifest.leader_id = spec.leader_id;
        for (const auto& obj : spec.scene) manifest.category_map[obj.object_id] = obj.category;

        WearerEntry leader;
        leader.wearer_id = spec.leader_id;
        leader.role = Role::leader;
        leader.clock_offset_ns = offsets[spec.leader_id];
        leader.gaze_path = "gaze_" + spec.leader_id + ".jsonl";
        leader.labelmap_path = "labelmaps_" + spec.leader_id + ".jsonl";
        leader.facetrack_path = "facetracks_" + spec.leader_id + ".jsonl";
        leader.transcript_path = "transcript.jsonl";
        manifest.wearers.push_back(std::move(leader));

        for (const auto& member : spec.members) {
            WearerEntry w;
            w.wearer_id = member;
            w.role = Role::member;
            w.clock_offset_ns = offsets[member];
            w.gaze_path = "gaze_" + member + ".jsonl";
            w.facetrack_path = "facetracks_" + member + ".jsonl";
            manifest.wearers.push_back(std::move(w));
        }
        write_json_file(out_dir / "manifest.json", manifest_to_json(manifest));
    }

    write_json_file(out_dir / "ground_truth.json", ground_truth_to_json(truth));
    return truth;
}

namespace {

bool within(TimeNs a, TimeNs b, TimeNs tol) { return std::llabs(a - b) <= tol; }

} // namespace

Json recovery_scores_to_json(const RecoveryScores& s) {
    return Json{
        {"boundary_agreement", s.boundary_agreement},
        {"truth_events", s.truth_events},
        {"matched_events", s.matched_events},
        {"object_accuracy", s.object_accuracy},
        {"ec_delta_total", s.ec_delta_total},
        {"ec_delta_per_dyad", s.ec_delta_per_dyad},
        {"transition_equal", s.transition_equal},
        {"conversation_accuracy", s.conversation_accuracy},
    };
}

RecoveryScores score_against_truth(const GroundTruth& truth, const SessionOutputs& outputs,
                                   double tolerance_ms) {
    if (truth.session_id != outputs.session_id) {
        fail(ErrorCode::SessionMismatch,
             "truth \"" + truth.session_id + "\" vs outputs \"" + outputs.session_id + "\"");
    }
    const TimeNs tol = ms_to_ns(tolerance_ms);
    RecoveryScores scores;

    // Boundary matching, in temporal order, each output event used once.
    std::vector<bool> used(outputs.events.size(), false);
    std::size_t matched_fixations = 0;
    std::size_t correct_categories = 0;
    std::size_t truth_fixations = 0;
    for (const auto& tev : truth.events) {
        if (tev.kind != EventKind::fixation && tev.kind != EventKind::saccade) continue;
        ++scores.truth_events;
        if (tev.kind == EventKind::fixation) ++truth_fixations;

        std::ptrdiff_t best = -1;
        TimeNs best_err = 0;
        for (std::size_t i = 0; i < outputs.events.size(); ++i) {
            if (used[i] || outputs.events[i].kind != tev.kind) continue;
            const auto& oev = outputs.events[i];
            if (!within(oev.start_ns, tev.start_ns, tol) || !within(oev.end_ns, tev.end_ns, tol)) {
                continue;
            }
            const TimeNs err =
                std::llabs(oev.start_ns - tev.start_ns) + std::llabs(oev.end_ns - tev.end_ns);
            if (best < 0 || err < best_err) {
                best = static_cast<std::ptrdiff_t>(i);
                best_err = err;
            }
        }
        if (best < 0) continue;
        used[static_cast<std::size_t>(best)] = true;
        ++scores.matched_events;

        if (tev.kind == EventKind::fixation) {
            ++matched_fixations;
            for (const auto& a : outputs.assignments) {
                if (a.start_ns == outputs.events[static_cast<std::size_t>(best)].start_ns) {
                    if (a.category == tev.category) ++correct_categories;
                    break;
                }
            }
        }
    }
    scores.boundary_agreement =
        scores.truth_events == 0
            ? 1.0
            : static_cast<double>(scores.matched_events) / static_cast<double>(scores.truth_events);
    scores.object_accuracy =
        truth_fixations == 0 ? 1.0
                             : static_cast<double>(correct_categories) /
                                   static_cast<double>(truth_fixations);

    // Eye contact deltas per dyad.
    std::map<std::string, int> truth_counts;
    for (const auto& w : truth.eye_contact) ++truth_counts[w.member];
    std::map<std::string, int> all_members = truth_counts;
    for (const auto& [member, n] : outputs.ec_counts) all_members.emplace(member, 0);
    int truth_total = 0, out_total = 0;
    for (const auto& [member, unused_] : all_members) {
        const int t = truth_counts.count(member) ? truth_counts[member] : 0;
        const int o = outputs.ec_counts.count(member) ? outputs.ec_counts.at(member) : 0;
        scores.ec_delta_per_dyad[member] = o - t;
        truth_total += t;
        out_total += o;
    }
    scores.ec_delta_total = out_total - truth_total;

    // Transition matrix equality against the planted category sequence.
    if (outputs.transition) {
        const TransitionMatrix expected = build_transition_matrix(
            truth.category_sequence, outputs.transition->states, outputs.transition->include_self);
        scores.transition_equal = expected.counts == outputs.transition->counts;
    }

    // Conversation labels, paired by (start time, speaker).
    std::size_t truth_utts = 0, correct_labels = 0;
    for (const auto& tu : truth.utterances) {
        if (!tu.label) continue;
        ++truth_utts;
        for (const auto& ou : outputs.utterances) {
            if (ou.start_ns == tu.start_ns && ou.speaker == tu.speaker) {
                if (ou.label && *ou.label == *tu.label) ++correct_labels;
                break;
            }
        }
    }
    scores.conversation_accuracy =
        truth_utts == 0 ? 1.0
                        : static_cast<double>(correct_labels) / static_cast<double>(truth_utts);
    return scores;
}

} // namespace teamlens
