// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. argv[1] (optional) is the CLI binary, exercised in the interface
// block at the end.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "teamlens/analysis.hpp"
#include "teamlens/error.hpp"
#include "teamlens/rng.hpp"
#include "teamlens/synth.hpp"

using namespace teamlens;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
fs::path g_root;
std::string g_cli;

void report(const std::string& id, const std::string& name, bool pass,
            const std::string& detail = "") {
    std::cout << (pass ? "PASS " : "FAIL ") << id << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

void run_guarded(const std::string& id, const std::string& name,
                 const std::function<void(std::ostringstream&)>& body) {
    std::ostringstream detail;
    try {
        body(detail);
        report(id, name, true, detail.str());
    } catch (const std::exception& e) {
        report(id, name, false, std::string(detail.str()) + " threw: " + e.what());
    }
}

#define EXPECT(cond, what)                                                                         \
    do {                                                                                           \
        if (!(cond)) throw std::runtime_error(std::string("expected ") + what);                    \
    } while (0)

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string dir_bytes(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += f.filename().string() + "\x01" + read_file(f) + "\x02";
    return all;
}

// ---- shared synthetic scene ------------------------------------------------
//
// Seven gaze targets laid out so every scripted hop is 260..367 px. At a
// 200 ms hop that puts measured mid-saccade speeds in [650, 1840] px/s and the
// smoothing shoulders under 310 px/s, cleanly split by a 400 px/s threshold.

constexpr int kPatient = 1, kDevice = 2, kScreen = 3, kM1 = 4, kM2 = 5, kM3 = 6;
const std::pair<double, double> kUnknownPoint{620, 880};

SynthSpec scene_spec(const std::string& session_id, std::uint64_t seed) {
    SynthSpec spec;
    spec.session_id = session_id;
    spec.seed = seed;
    spec.leader_id = "leader";
    spec.members = {"m1", "m2", "m3"};
    spec.scene = {
        {kPatient, "patient", 200, 600, 400, 800, ""},
        {kDevice, "device", 220, 300, 380, 460, ""},
        {kScreen, "screen", 520, 540, 720, 700, ""},
        {kM1, "member", 540, 180, 700, 340, "m1"},
        {kM2, "member", 860, 300, 1020, 460, "m2"},
        {kM3, "member", 860, 620, 1020, 780, "m3"},
    };
    return spec;
}

SynthSegment seg_fix(int object_id, double duration_s) {
    SynthSegment s;
    s.kind = SynthSegment::Kind::fixation;
    s.object_id = object_id;
    s.duration_s = duration_s;
    return s;
}

SynthSegment seg_point(std::pair<double, double> point, double duration_s) {
    SynthSegment s;
    s.kind = SynthSegment::Kind::fixation;
    s.point = point;
    s.duration_s = duration_s;
    return s;
}

SynthSegment seg_gap(double duration_s) {
    SynthSegment s;
    s.kind = SynthSegment::Kind::gap;
    s.duration_s = duration_s;
    return s;
}

SynthSegment seg_saccade(double duration_s = 0.2) {
    SynthSegment s;
    s.kind = SynthSegment::Kind::saccade;
    s.duration_s = duration_s;
    return s;
}

SynthSegment seg_mutual(const std::string& member, double duration_s) {
    SynthSegment s;
    s.kind = SynthSegment::Kind::mutual_gaze;
    s.member = member;
    s.duration_s = duration_s;
    return s;
}

SynthSegment seg_utter(const std::string& text, IntentLabel label, double duration_s) {
    SynthSegment s;
    s.kind = SynthSegment::Kind::utterance;
    s.speaker = "leader";
    s.text = text;
    s.label = label;
    s.duration_s = duration_s;
    return s;
}

AnalysisConfig synth_profile_config() {
    AnalysisConfig config;
    config.classifier.smoothing_window_samples = 3;
    config.classifier.smoothing_poly_order = 1;
    config.classifier.velocity_threshold_mode = ThresholdMode::fixed;
    config.classifier.fixed_threshold_px_s = 400.0;
    config.classifier.max_saccade_ms = 800.0;
    return config;
}

// 10-minute recovery session: 53 laps over the scene, two mutual windows per
// lap, 372 planted fixations and 371 saccades.
SynthSpec recovery_spec(double noise_px) {
    SynthSpec spec = scene_spec(noise_px > 0 ? "recovery-noisy" : "recovery-clean", 4242);
    spec.duration_s = 600.0;
    spec.gaze_rate_hz = 10.0;
    spec.frame_rate_hz = 30.0;
    spec.noise_px = noise_px;
    spec.script.push_back(seg_gap(0.5));
    for (int lap = 0; lap < 53; ++lap) {
        spec.script.push_back(seg_fix(kPatient, 2.0));
        spec.script.push_back(seg_saccade());
        spec.script.push_back(seg_fix(kDevice, 1.5));
        spec.script.push_back(seg_saccade());
        spec.script.push_back(seg_mutual("m1", 1.2));
        spec.script.push_back(seg_saccade());
        spec.script.push_back(seg_fix(kM2, 1.3));
        spec.script.push_back(seg_saccade());
        spec.script.push_back(seg_mutual("m3", 1.1));
        spec.script.push_back(seg_saccade());
        spec.script.push_back(seg_point(kUnknownPoint, 1.0));
        spec.script.push_back(seg_saccade());
        spec.script.push_back(seg_fix(kScreen, 1.7));
        spec.script.push_back(seg_saccade());
    }
    spec.script.push_back(seg_fix(kPatient, 1.0)); // the final saccade needs a target
    spec.script.push_back(seg_utter("start compressions now, Tanaka", IntentLabel::DO, 2.0));
    spec.script.push_back(seg_utter("someone chart the time", IntentLabel::UO, 2.0));
    spec.script.push_back(seg_utter("next we prepare the airway", IntentLabel::PL, 2.0));
    spec.script.push_back(seg_utter("you are in charge of drugs", IntentLabel::TA, 2.0));
    spec.script.push_back(seg_utter("okay", IntentLabel::NONE, 2.0));
    return spec;
}

struct LeaderFixture {
    std::string session_id;
    double patient, member, screen, device, unknown;
    int ec_count;
    int do_n, uo_n, pl_n, ta_n; // per 1000 leader utterances
    std::string team, ottawa;
};

// Fixture sessions: 100 Hz gaze so the published fixation means land on the
// sample grid, dropout gaps between fixations, 150 ms face glances (below the
// 200 ms fixation floor of the fixture config) carrying the eye contacts.
SynthSpec fixture_spec(const LeaderFixture& row, std::uint64_t seed) {
    SynthSpec spec = scene_spec(row.session_id, seed);
    spec.duration_s = 40.0;
    spec.gaze_rate_hz = 100.0;
    spec.frame_rate_hz = 30.0;
    spec.script.push_back(seg_gap(0.5));
    spec.script.push_back(seg_fix(kPatient, row.patient));
    spec.script.push_back(seg_gap(0.2));
    spec.script.push_back(seg_fix(kM1, row.member));
    spec.script.push_back(seg_gap(0.2));
    spec.script.push_back(seg_fix(kScreen, row.screen));
    spec.script.push_back(seg_gap(0.2));
    spec.script.push_back(seg_fix(kDevice, row.device));
    spec.script.push_back(seg_gap(0.2));
    spec.script.push_back(seg_point(kUnknownPoint, row.unknown));
    spec.script.push_back(seg_gap(0.2));
    for (int i = 0; i < row.ec_count; ++i) {
        spec.script.push_back(seg_mutual("m1", 0.15));
        spec.script.push_back(seg_gap(0.35));
    }
    const auto utter = [&spec](int count, IntentLabel label) {
        for (int i = 0; i < count; ++i) {
            spec.script.push_back(seg_utter("utterance", label, 0.02));
        }
    };
    utter(row.do_n, IntentLabel::DO);
    utter(row.uo_n, IntentLabel::UO);
    utter(row.pl_n, IntentLabel::PL);
    utter(row.ta_n, IntentLabel::TA);
    utter(1000 - row.do_n - row.uo_n - row.pl_n - row.ta_n, IntentLabel::NONE);
    return spec;
}

AnalysisConfig fixture_config(const LeaderFixture& row) {
    AnalysisConfig config = synth_profile_config();
    config.classifier.min_fixation_ms = 200.0; // face glances stay out of the stats
    config.eye_contact.min_duration_ms = 50.0; // 150 ms windows hold 4-5 frames
    config.report.team_score = row.team;
    config.report.ottawa_score = row.ottawa;
    return config;
}

int run_cli(const std::string& args, std::string* output = nullptr) {
    const fs::path out_file = g_root / "cli_output.txt";
    const std::string cmd = g_cli + " " + args + " > " + out_file.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) *output = read_file(out_file);
    return WEXITSTATUS(status);
}

// ---- criteria ---------------------------------------------------------------

void criterion1(std::ostringstream& detail) {
    const fs::path dir = g_root / "c1";
    const SynthSpec spec = recovery_spec(0.0);
    const GroundTruth truth = generate_session(spec, dir);

    std::size_t fixations = 0, saccades = 0;
    for (const auto& ev : truth.events) {
        fixations += ev.kind == EventKind::fixation;
        saccades += ev.kind == EventKind::saccade;
    }
    EXPECT(fixations >= 20, ">= 20 planted fixations");
    EXPECT(saccades >= 5, ">= 5 planted saccades");

    const AnalysisConfig config = synth_profile_config();
    const auto start = std::chrono::steady_clock::now();
    const AnalysisResult result = run_analysis(dir / "manifest.json", config);
    const double elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const RecoveryScores scores = score_against_truth(truth, result.to_outputs(), 100.0);
    detail << "agreement=" << scores.boundary_agreement << " objects=" << scores.object_accuracy
           << " ec_delta=" << scores.ec_delta_total << " runtime=" << elapsed_s << "s";
    EXPECT(scores.boundary_agreement == 1.0, "boundary agreement 1.0 at +/-100 ms");
    EXPECT(scores.object_accuracy == 1.0, "object accuracy 1.0");
    EXPECT(scores.ec_delta_total == 0, "eye-contact count delta 0");
    for (const auto& [member, delta] : scores.ec_delta_per_dyad) {
        EXPECT(delta == 0, "per-dyad eye-contact delta 0 for " + member);
    }
    EXPECT(scores.transition_equal, "transition matrix equal to ground truth");
    EXPECT(elapsed_s < 10.0, "runtime under 10 s");

    write_outputs(result, config, g_root / "c1_out");
}

void criterion2(std::ostringstream& detail) {
    const fs::path dir = g_root / "c2";
    const SynthSpec spec = recovery_spec(3.0);
    const GroundTruth truth = generate_session(spec, dir);
    const AnalysisResult result = run_analysis(dir / "manifest.json", synth_profile_config());
    const RecoveryScores scores = score_against_truth(truth, result.to_outputs(), 150.0);
    detail << "agreement=" << scores.boundary_agreement << " objects=" << scores.object_accuracy;
    EXPECT(scores.boundary_agreement >= 0.9, "boundary agreement >= 0.9 at +/-150 ms");
    EXPECT(scores.object_accuracy >= 0.95, "object accuracy >= 0.95");
}

void check_close(double got, double want, const std::string& what) {
    if (std::fabs(got - want) >= 0.005) {
        std::ostringstream msg;
        msg << what << " = " << got << ", want " << want << " to 2 decimal places";
        throw std::runtime_error(msg.str());
    }
}

void criterion3(std::ostringstream& detail) {
    const LeaderFixture rows[2] = {
        {"fixture-leader1", 2.28, 1.98, 1.54, 1.80, 1.04, 11, 172, 216, 113, 34, "27/44", "35/35"},
        {"fixture-leader2", 1.50, 1.24, 2.45, 2.08, 1.21, 3, 53, 221, 95, 11, "12/44", "26/35"},
    };
    for (const auto& row : rows) {
        const fs::path dir = g_root / row.session_id;
        generate_session(fixture_spec(row, 7), dir);
        const AnalysisResult result = run_analysis(dir / "manifest.json", fixture_config(row));
        const LeadershipReport& r = result.report;

        EXPECT(r.fixation.has_value(), "fixation section");
        check_close(r.fixation->at("patient").mean_s, row.patient, row.session_id + " patient");
        check_close(r.fixation->at("member").mean_s, row.member, row.session_id + " member");
        check_close(r.fixation->at("screen").mean_s, row.screen, row.session_id + " screen");
        check_close(r.fixation->at("device").mean_s, row.device, row.session_id + " device");
        check_close(r.fixation->at("unknown").mean_s, row.unknown, row.session_id + " unknown");

        EXPECT(r.ec_total.has_value(), "eye-contact section");
        EXPECT(*r.ec_total == row.ec_count,
               row.session_id + " EC count " + std::to_string(row.ec_count));

        EXPECT(r.conv_ratios.has_value(), "conversation section");
        check_close(r.conv_ratios->at("DO"), row.do_n / 10.0, row.session_id + " DO");
        check_close(r.conv_ratios->at("UO"), row.uo_n / 10.0, row.session_id + " UO");
        check_close(r.conv_ratios->at("PL"), row.pl_n / 10.0, row.session_id + " PL");
        check_close(r.conv_ratios->at("TA"), row.ta_n / 10.0, row.session_id + " TA");

        EXPECT(r.team_score == row.team, "TEAM echo");
        EXPECT(r.ottawa_score == row.ottawa, "Ottawa echo");
    }
    detail << "leader1 and leader2 rows reproduced to 2 decimal places";
}

void criterion4(std::ostringstream& detail) {
    // (a) mode assignment vs brute-force tally
    {
        SplitMix64 rng(401);
        const std::map<int, std::string> cats = {{1, "member"}, {2, "patient"}, {3, "screen"}};
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 1 + static_cast<int>(rng.next_below(50));
            std::vector<int> labels;
            for (int i = 0; i < n; ++i) labels.push_back(static_cast<int>(rng.next_below(4)));

            BoxTrackLabelSource src;
            src.priority = {1, 2, 3};
            src.width = src.height = 100;
            GazeTrack track;
            track.meta.width = track.meta.height = 100;
            for (int f = 0; f < n; ++f) {
                BoxFrame frame;
                frame.frame_idx = f;
                frame.t_ns = f * 100;
                if (labels[f] != 0) frame.boxes.push_back({labels[f], 40, 40, 60, 60});
                src.frames.push_back(frame);
                track.samples.push_back({f * 100, 50.0, 50.0, std::nullopt, true, 0});
            }
            const LabelSource source = LabelSource::from_boxes(std::move(src));
            const FramedGaze framed = align_to_frames(track, source.frame_times(), 10000);
            EyeMovementEvent fix;
            fix.kind = EventKind::fixation;
            fix.start_ns = 0;
            fix.end_ns = n * 100;
            const auto a = assign_fixation(0, fix, source, framed, track, cats);

            std::map<int, int> tally;
            for (int lab : labels) ++tally[lab];
            for (const auto& [label, count] : tally) {
                EXPECT(tally[a.object_id] >= count, "mode wins every label");
            }
            EXPECT(static_cast<int>(std::llround(a.support * a.total_votes)) ==
                       tally[a.object_id],
                   "support times votes equals the winner count");
        }
    }
    // (b) eye-contact conjunction symmetry
    {
        SplitMix64 rng(402);
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 5 + static_cast<int>(rng.next_below(60));
            FaceTrackSet lf, mf;
            lf.video_owner = "l";
            mf.video_owner = "m";
            GazeTrack lg, mg;
            lg.meta.width = mg.meta.width = 1280;
            lg.meta.height = mg.meta.height = 960;
            for (int i = 0; i < n; ++i) {
                const TimeNs t = i * 33333333LL;
                lf.frames.push_back({i, t, {{"m", 100, 100, 200, 200, 1.0}}});
                mf.frames.push_back({i, t, {{"l", 500, 500, 640, 640, 1.0}}});
                const int hit = static_cast<int>(rng.next_below(4));
                lg.samples.push_back({t, (hit & 1) ? 150.0 : 50.0, 150.0, std::nullopt, true, 0});
                mg.samples.push_back({t, (hit & 2) ? 570.0 : 50.0, 570.0, std::nullopt, true, 0});
            }
            EcStreams leader{"l", &lf, &lg, align_to_frames(lg, lf.frame_times(), 60 * kNsPerMs)};
            EcStreams member{"m", &mf, &mg, align_to_frames(mg, mf.frame_times(), 60 * kNsPerMs)};
            const auto fwd = mutual_gaze_frames(leader, member, 0, 60 * kNsPerMs);
            const auto bwd = mutual_gaze_frames(member, leader, 0, 60 * kNsPerMs);
            EXPECT(fwd.size() == bwd.size(), "symmetric instant count");
            for (std::size_t i = 0; i < fwd.size(); ++i) {
                EXPECT(fwd[i].t_ns == bwd[i].t_ns, "symmetric instants");
            }
        }
    }
    // (c) transition-matrix sum invariant
    {
        SplitMix64 rng(403);
        const std::vector<std::string> states = {"patient", "member", "screen", "device",
                                                 "unknown"};
        for (int trial = 0; trial < 200; ++trial) {
            const int n = static_cast<int>(rng.next_below(60));
            std::vector<std::string> seq;
            for (int i = 0; i < n; ++i) seq.push_back(states[rng.next_below(states.size())]);
            const TransitionMatrix m = build_transition_matrix(seq, states, true);
            EXPECT(m.total() == std::max(0, n - 1), "sum = max(0, n_fixations - 1)");
        }
    }
    // (d) symmetry index bounds and transpose invariance
    {
        SplitMix64 rng(404);
        for (int trial = 0; trial < 200; ++trial) {
            TransitionMatrix m;
            m.states = {"a", "b", "c", "d"};
            m.counts.assign(4, std::vector<long long>(4, 0));
            for (auto& row : m.counts) {
                for (auto& c : row) c = static_cast<long long>(rng.next_below(15));
            }
            const double index = symmetry_index(m);
            EXPECT(index >= 0.0 && index <= 1.0, "index in [0, 1]");
            TransitionMatrix t = m;
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) t.counts[a][b] = m.counts[b][a];
            }
            EXPECT(std::fabs(symmetry_index(t) - index) < 1e-12, "transpose invariance");
        }
    }
    // (e) time-shift equivariance of event classification
    {
        SplitMix64 rng(405);
        ClassifierParams params;
        params.smoothing_window_samples = 3;
        params.smoothing_poly_order = 1;
        params.velocity_threshold_mode = ThresholdMode::fixed;
        params.fixed_threshold_px_s = 750.0;
        for (int trial = 0; trial < 200; ++trial) {
            GazeTrack a, b;
            a.meta.width = b.meta.width = 200000;
            a.meta.height = b.meta.height = 200000;
            TimeNs t = 0;
            double x = 200;
            const int n = 30 + static_cast<int>(rng.next_below(60));
            const TimeNs shift =
                static_cast<TimeNs>(rng.next_below(2000000000ULL)) - 1000000000;
            for (int i = 0; i < n; ++i) {
                t += 100 * kNsPerMs;
                if (rng.next_unit() < 0.08) x += 300;
                a.samples.push_back({t, x, 100, std::nullopt, true, 0});
                b.samples.push_back({t + shift, x, 100, std::nullopt, true, 0});
            }
            const EventTimeline ta = classify_events(a, params);
            const EventTimeline tb = classify_events(b, params);
            EXPECT(ta.events.size() == tb.events.size(), "same event count");
            for (std::size_t i = 0; i < ta.events.size(); ++i) {
                EXPECT(tb.events[i].start_ns == ta.events[i].start_ns + shift, "start shifts");
                EXPECT(tb.events[i].end_ns == ta.events[i].end_ns + shift, "end shifts");
                EXPECT(tb.events[i].kind == ta.events[i].kind, "kind unchanged");
            }
        }
    }
    // (f) determinism: double-run byte equality for synth and analyze
    {
        SplitMix64 rng(406);
        const AnalysisConfig config = synth_profile_config();
        for (int trial = 0; trial < 200; ++trial) {
            SynthSpec spec = scene_spec("det-" + std::to_string(trial), rng.next_u64());
            spec.duration_s = 5.0;
            spec.noise_px = rng.next_unit() < 0.5 ? 0.0 : 2.0;
            spec.script.push_back(seg_gap(0.3));
            spec.script.push_back(seg_fix(kPatient, 0.8));
            const int targets[] = {kDevice, kM1, kScreen, kM2};
            for (int k = 0; k < 3; ++k) {
                const bool hop = rng.next_unit() < 0.6;
                spec.script.push_back(hop ? seg_saccade() : seg_gap(0.2));
                const double dur = 0.5 + 0.3 * rng.next_unit();
                spec.script.push_back(seg_fix(targets[rng.next_below(4)], dur));
            }
            if (rng.next_unit() < 0.5) {
                spec.script.push_back(seg_utter("check the monitor now", IntentLabel::DO, 0.5));
            }

            const fs::path da = g_root / "det_a";
            const fs::path db = g_root / "det_b";
            fs::remove_all(da);
            fs::remove_all(db);
            generate_session(spec, da);
            generate_session(spec, db);
            EXPECT(dir_bytes(da) == dir_bytes(db), "synth byte determinism");

            const fs::path oa = g_root / "det_out_a";
            const fs::path ob = g_root / "det_out_b";
            fs::remove_all(oa);
            fs::remove_all(ob);
            write_outputs(run_analysis(da / "manifest.json", config), config, oa);
            write_outputs(run_analysis(da / "manifest.json", config), config, ob);
            EXPECT(dir_bytes(oa) == dir_bytes(ob), "analyze byte determinism");
        }
    }
    detail << "6 suites x 200 cases";
}

void criterion5(std::ostringstream& detail) {
    const auto run_sequence = [&](const std::string& id,
                                  const std::vector<int>& objects) -> double {
        SynthSpec spec = scene_spec(id, 5);
        spec.duration_s = 4.0 + 1.3 * static_cast<double>(objects.size());
        spec.script.push_back(seg_gap(0.5));
        for (int object : objects) {
            spec.script.push_back(seg_fix(object, 1.0));
            spec.script.push_back(seg_gap(0.3));
        }
        const fs::path dir = g_root / id;
        generate_session(spec, dir);
        const AnalysisResult result = run_analysis(dir / "manifest.json", synth_profile_config());
        EXPECT(result.report.symmetry.has_value(), "symmetry computed");
        return *result.report.symmetry;
    };

    // every A->B paired with B->A
    const double balanced =
        run_sequence("balanced", {kPatient, kM1, kPatient, kScreen, kPatient});
    // no reverse transition at all
    const double one_way =
        run_sequence("one-way", {kPatient, kM1, kScreen, kPatient, kM1, kScreen});
    detail << "balanced=" << balanced << " one_way=" << one_way;
    EXPECT(balanced == 1.0, "balanced script symmetry 1.0");
    EXPECT(one_way == 0.0, "one-directional script symmetry 0.0");
}

void criterion6(std::ostringstream& detail) {
    const fs::path dir = g_root / "c6";
    fs::create_directories(dir);
    const std::map<int, std::string> cats = {{1, "patient"}, {2, "member"}};
    const StreamMeta meta;
    int checked = 0;

    const auto expect_code = [&checked](const std::string& what, ErrorCode want,
                                        const std::function<void()>& fn) {
        try {
            fn();
        } catch (const Error& e) {
            if (e.code() != want) {
                throw std::runtime_error(what + ": got " + error_name(e.code()) + ", want " +
                                         error_name(want));
            }
            ++checked;
            return;
        }
        throw std::runtime_error(what + ": accepted corrupt input");
    };

    const auto put = [&dir](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        out << content;
        return dir / name;
    };

    const auto p1 = put("dup_ts.jsonl", "{\"t_ns\": 0, \"x\": 1.0, \"y\": 1.0}\n"
                                        "{\"t_ns\": 0, \"x\": 2.0, \"y\": 2.0}\n");
    expect_code("duplicate gaze timestamps", ErrorCode::NonMonotonicTimestamps,
                [&] { load_gaze_track(p1, meta, 0); });

    const auto p2 = put("empty.jsonl", "\n");
    expect_code("empty gaze stream", ErrorCode::EmptyStream, [&] { load_gaze_track(p2, meta, 0); });

    const auto p3 = put("no_leader.json",
                        R"({"session_id": "s", "epoch_ns": 0, "category_map": {},
                            "wearers": [{"wearer_id": "w", "role": "member", "clock_offset_ns": 0}]})");
    expect_code("manifest missing leader_id", ErrorCode::MissingField, [&] { parse_manifest(p3); });

    const auto p4 = put("dup_wearer.json",
                        R"({"session_id": "s", "epoch_ns": 0, "leader_id": "w", "category_map": {},
                            "wearers": [{"wearer_id": "w", "role": "leader", "clock_offset_ns": 0},
                                        {"wearer_id": "w", "role": "member", "clock_offset_ns": 0}]})");
    expect_code("duplicate wearer", ErrorCode::DuplicateWearer, [&] { parse_manifest(p4); });

    const auto p5 = put("bad_cats.json",
                        R"({"session_id": "s", "epoch_ns": 0, "leader_id": "w",
                            "category_map": {"0": "patient"},
                            "wearers": [{"wearer_id": "w", "role": "leader", "clock_offset_ns": 0}]})");
    expect_code("background id in the category map", ErrorCode::BadCategoryMap,
                [&] { parse_manifest(p5); });

    const auto p6 = put("rle_under.jsonl",
                        R"({"frame_idx": 0, "t_ns": 0, "w": 4, "h": 1, "rows": [[[0, 3]]]})"
                        "\n");
    expect_code("RLE underflow", ErrorCode::RleUnderflow, [&] { load_label_source(p6, cats, 0); });

    const auto p7 = put("rle_over.jsonl",
                        R"({"frame_idx": 0, "t_ns": 0, "w": 4, "h": 1, "rows": [[[0, 5]]]})"
                        "\n");
    expect_code("RLE overflow", ErrorCode::RleOverflow, [&] { load_label_source(p7, cats, 0); });

    const auto p8 = put("bad_label.jsonl",
                        R"({"frame_idx": 0, "t_ns": 0, "w": 4, "h": 1, "rows": [[[7, 4]]]})"
                        "\n");
    expect_code("unknown category id", ErrorCode::UnknownObjectId,
                [&] { load_label_source(p8, cats, 0); });

    const auto p9 = put("degen_box.jsonl",
                        R"({"frame_idx": 0, "t_ns": 0, "boxes": [{"person_id": "m", "x0": 10, "y0": 10, "x1": 10, "y1": 30}]})"
                        "\n");
    expect_code("degenerate face box", ErrorCode::DegenerateBox,
                [&] { load_face_tracks(p9, "w", 0); });

    const auto p10 = put("bad_transcript.jsonl",
                         R"({"start_ns": 100, "end_ns": 0, "speaker": "w", "text": "x"})"
                         "\n");
    expect_code("reversed utterance interval", ErrorCode::BadRecord,
                [&] { load_transcript(p10, 0); });

    detail << checked << " corruption cases rejected by name";
    EXPECT(checked == 10, "10 canonical cases");
}

// CLI surface: exit codes, determinism through the binary, score and overlay
// round trips.
void interface_checks(std::ostringstream& detail) {
    EXPECT(!g_cli.empty(), "CLI binary path in argv[1]");

    SynthSpec spec = scene_spec("cli-session", 77);
    spec.duration_s = 14.0;
    spec.noise_px = 1.0; // so the seed actually shapes the streams
    spec.script = {seg_gap(0.5),          seg_fix(kPatient, 2.0),
                   seg_saccade(),         seg_fix(kScreen, 2.0),
                   seg_saccade(),         seg_mutual("m1", 1.5),
                   seg_saccade(),         seg_fix(kDevice, 1.5),
                   seg_utter("push one of adrenaline now", IntentLabel::DO, 1.0)};
    const fs::path spec_path = g_root / "cli_spec.json";
    write_json_file(spec_path, synth_spec_to_json(spec));

    const AnalysisConfig config = synth_profile_config();
    const fs::path config_path = g_root / "cli_config.json";
    write_json_file(config_path, analysis_config_to_json(config));

    EXPECT(run_cli("synth --spec " + spec_path.string() + " --out " +
                   (g_root / "cli_s1").string()) == 0,
           "synth exit 0");
    EXPECT(run_cli("synth --spec " + spec_path.string() + " --out " +
                   (g_root / "cli_s2").string()) == 0,
           "synth exit 0 (second run)");
    EXPECT(dir_bytes(g_root / "cli_s1") == dir_bytes(g_root / "cli_s2"),
           "synth byte determinism via CLI");

    const std::string manifest = (g_root / "cli_s1" / "manifest.json").string();
    EXPECT(run_cli("validate --manifest " + manifest) == 0, "validate exit 0");

    {
        const fs::path broken_dir = g_root / "cli_broken";
        fs::remove_all(broken_dir);
        fs::copy(g_root / "cli_s1", broken_dir, fs::copy_options::recursive);
        const fs::path gaze = broken_dir / "gaze_leader.jsonl";
        std::string content = read_file(gaze);
        const auto first_line = content.substr(0, content.find('\n') + 1);
        std::ofstream(gaze, std::ios::binary) << first_line << content;
        std::string out;
        EXPECT(run_cli("validate --manifest " + (broken_dir / "manifest.json").string(), &out) == 1,
               "validate exit 1 on duplicate timestamps");
        EXPECT(out.find("NonMonotonicTimestamps") != std::string::npos, "error name printed");
        EXPECT(out.find(":2") != std::string::npos, "offending line printed");
    }

    // validate warns (without failing) when eye contact is on but no wearer
    // has face tracks
    {
        Json doc = read_json_file(g_root / "cli_s1" / "manifest.json");
        for (auto& wearer : doc["wearers"]) wearer.erase("facetracks");
        const fs::path stripped = g_root / "cli_s1" / "manifest_nofaces.json";
        write_json_file(stripped, doc);
        std::string out;
        EXPECT(run_cli("validate --manifest " + stripped.string(), &out) == 0,
               "validate exit 0 without face tracks");
        EXPECT(out.find("warning") != std::string::npos, "face-track warning printed");
    }

    EXPECT(run_cli("analyze --manifest " + manifest + " --config " + config_path.string() +
                   " --out " + (g_root / "cli_a1").string()) == 0,
           "analyze exit 0");
    EXPECT(run_cli("analyze --manifest " + manifest + " --config " + config_path.string() +
                   " --out " + (g_root / "cli_a2").string()) == 0,
           "analyze exit 0 (second run)");
    EXPECT(dir_bytes(g_root / "cli_a1") == dir_bytes(g_root / "cli_a2"),
           "analyze byte determinism via CLI");

    // subsystem toggles and the analysis-failure exit code
    {
        EXPECT(run_cli("analyze --manifest " + manifest + " --config " + config_path.string() +
                       " --no-eye-contact --out " + (g_root / "cli_noec").string()) == 0,
               "analyze --no-eye-contact exit 0");
        const Json report = read_json_file(g_root / "cli_noec" / "report.json");
        EXPECT(report.at("ec_total").is_null(), "ec section null when toggled off");

        Json doc = read_json_file(g_root / "cli_s1" / "manifest.json");
        for (auto& wearer : doc["wearers"]) {
            wearer.erase("gaze");
            wearer.erase("labelmaps");
            wearer.erase("facetracks");
            wearer.erase("transcript");
        }
        const fs::path bare = g_root / "manifest_bare.json"; // no file references
        write_json_file(bare, doc);
        std::string out;
        EXPECT(run_cli("analyze --manifest " + bare.string() + " --out " +
                           (g_root / "cli_bare").string(),
                       &out) == 2,
               "IncompleteSession exits 2");
        EXPECT(out.find("IncompleteSession") != std::string::npos, "IncompleteSession printed");

        EXPECT(run_cli("synth --spec " + spec_path.string() + " --seed 9001 --out " +
                       (g_root / "cli_s3").string()) == 0,
               "synth --seed exit 0");
        EXPECT(read_file(g_root / "cli_s1" / "gaze_leader.jsonl") !=
                   read_file(g_root / "cli_s3" / "gaze_leader.jsonl"),
               "seed override changes the generated streams");

        EXPECT(run_cli("analyze --manifest " + manifest + " --config " + config_path.string() +
                       " --emit-run-metadata --out " + (g_root / "cli_meta").string()) == 0,
               "analyze --emit-run-metadata exit 0");
        EXPECT(fs::exists(g_root / "cli_meta" / "run_metadata.json"),
               "run metadata written when requested");
        EXPECT(!fs::exists(g_root / "cli_a1" / "run_metadata.json"),
               "no run metadata by default");
    }

    {
        std::string out;
        EXPECT(run_cli("score --truth " + (g_root / "cli_s1" / "ground_truth.json").string() +
                           " --analysis " + (g_root / "cli_a1").string() + " --tolerance-ms 100",
                       &out) == 0,
               "score exit 0");
        const Json scores = Json::parse(out);
        EXPECT(scores.at("boundary_agreement").get<double>() == 1.0, "CLI score agreement 1.0");
        EXPECT(scores.at("ec_delta_total").get<int>() == 0, "CLI score EC delta 0");
    }

    {
        const fs::path overlay = g_root / "overlay.jsonl";
        EXPECT(run_cli("export-overlay --manifest " + manifest + " --config " +
                       config_path.string() + " --analysis " + (g_root / "cli_a1").string() +
                       " --out " + overlay.string()) == 0,
               "export-overlay exit 0");
        bool saw_patient_fixation = false, saw_ec = false, saw_no_gaze = false;
        for (const auto& rec : read_jsonl(overlay)) {
            const Json& r = rec.value;
            const TimeNs t = r.at("t_ns").get<TimeNs>();
            if (t > sec_to_ns(1.0) && t < sec_to_ns(2.0)) { // inside the first patient fixation
                saw_patient_fixation |= !r.at("kind").is_null() && r.at("kind") == "fixation" &&
                                        !r.at("category").is_null() &&
                                        r.at("category") == "patient";
            }
            if (t > sec_to_ns(5.5) && t < sec_to_ns(6.5)) { // inside the mutual window
                saw_ec |= r.at("ec").get<bool>();
            }
            if (t < sec_to_ns(0.3)) { // inside the leading dropout
                saw_no_gaze |= r.at("gaze").is_null();
            }
        }
        EXPECT(saw_patient_fixation, "overlay marks the patient fixation");
        EXPECT(saw_ec, "overlay marks the eye-contact window");
        EXPECT(saw_no_gaze, "overlay reports missing gaze in dropouts");

        try {
            export_overlay(manifest, config, g_root / "does_not_exist", g_root / "x.jsonl");
            throw std::runtime_error("overlay accepted a missing analysis directory");
        } catch (const Error& e) {
            EXPECT(e.code() == ErrorCode::MissingAnalysis, "MissingAnalysis for absent exports");
        }
    }
    detail << "validate/analyze/synth/score/export-overlay";
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];
    g_root = fs::temp_directory_path() / ("teamlens_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(g_root);

    run_guarded("criterion 1", "zero-noise synthetic recovery", criterion1);
    run_guarded("criterion 2", "noisy robustness (sigma 3 px)", criterion2);
    run_guarded("criterion 3", "published two-leader report rows via fixtures", criterion3);
    run_guarded("criterion 4", "property suites (>= 200 randomized cases each)", criterion4);
    run_guarded("criterion 5", "balanced vs one-directional transition symmetry", criterion5);
    run_guarded("criterion 6", "format validators reject 10 corruption cases", criterion6);
    run_guarded("interface", "CLI surface checks", interface_checks);

    std::error_code ec;
    fs::remove_all(g_root, ec);

    std::cout << (g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << std::endl;
    return g_failures == 0 ? 0 : 1;
}
