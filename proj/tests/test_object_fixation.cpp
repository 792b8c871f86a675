#include <doctest.h>

#include <algorithm>
#include <map>

#include "helpers.hpp"
#include "teamlens/object_fixation.hpp"
#include "teamlens/rng.hpp"

using namespace teamlens;

namespace {

const std::map<int, std::string> kCats = {{1, "member"}, {2, "patient"}, {3, "screen"}};

// One box-track frame per vote; frame f shows only the box of labels[f], so a
// fixed gaze point votes exactly the planted sequence.
struct VoteRig {
    LabelSource source;
    FramedGaze framed;
    GazeTrack track;
    EyeMovementEvent fix;

    explicit VoteRig(const std::vector<int>& labels) : source(build_source(labels)) {
        std::vector<std::tuple<TimeNs, double, double>> samples;
        for (std::size_t f = 0; f < labels.size(); ++f) {
            samples.push_back({static_cast<TimeNs>(f) * 100, 50.0, 50.0});
        }
        track = testutil::make_track(samples);
        framed = align_to_frames(track, source.frame_times(), 10'000);
        fix.kind = EventKind::fixation;
        fix.start_ns = 0;
        fix.end_ns = static_cast<TimeNs>(labels.size()) * 100;
    }

    static LabelSource build_source(const std::vector<int>& labels) {
        BoxTrackLabelSource src;
        src.priority = {1, 2, 3};
        src.width = 100;
        src.height = 100;
        for (std::size_t f = 0; f < labels.size(); ++f) {
            BoxFrame frame;
            frame.frame_idx = static_cast<int>(f);
            frame.t_ns = static_cast<TimeNs>(f) * 100;
            if (labels[f] != 0) frame.boxes.push_back({labels[f], 40, 40, 60, 60});
            src.frames.push_back(std::move(frame));
        }
        return LabelSource::from_boxes(std::move(src));
    }
};

} // namespace

TEST_CASE("unanimous votes give support 1.0") {
    VoteRig rig({2, 2, 2, 2, 2});
    const auto a = assign_fixation(0, rig.fix, rig.source, rig.framed, rig.track, kCats);
    CHECK(a.object_id == 2);
    CHECK(a.category == "patient");
    CHECK(a.support == 1.0);
}

TEST_CASE("majority 3 to 2 gives support 0.6") {
    VoteRig rig({1, 2, 1, 2, 1});
    const auto a = assign_fixation(0, rig.fix, rig.source, rig.framed, rig.track, kCats);
    // oracle: brute-force count -> 1 has 3 of 5 votes
    CHECK(a.object_id == 1);
    CHECK(a.support == doctest::Approx(0.6));
    CHECK(a.winner_votes == 3);
    CHECK(a.total_votes == 5);
}

TEST_CASE("tie resolves by category priority") {
    VoteRig rig({1, 1, 2, 2});
    // object 2 is "patient"; patient outranks member in the default priority
    const auto a = assign_fixation(0, rig.fix, rig.source, rig.framed, rig.track, kCats);
    CHECK(a.object_id == 2);
    CHECK(a.category == "patient");

    // within one category the lower object id wins
    const std::map<int, std::string> same_cat = {{1, "member"}, {2, "member"}};
    const auto b = assign_fixation(0, rig.fix, rig.source, rig.framed, rig.track, same_cat);
    CHECK(b.object_id == 1);
}

TEST_CASE("fixation entirely over background maps to unknown") {
    VoteRig rig({0, 0, 0});
    const auto a = assign_fixation(0, rig.fix, rig.source, rig.framed, rig.track, kCats);
    CHECK(a.object_id == 0);
    CHECK(a.category == "unknown");
    CHECK(a.support == 1.0);
}

TEST_CASE("no votes at all degrades to unknown with support 1.0") {
    VoteRig rig({1, 1});
    rig.fix.start_ns = 900'000; // window past every frame
    rig.fix.end_ns = 950'000;
    const auto a = assign_fixation(0, rig.fix, rig.source, rig.framed, rig.track, kCats);
    CHECK(a.object_id == 0);
    CHECK(a.category == "unknown");
    CHECK(a.support == 1.0);
    CHECK(a.total_votes == 0);
}

TEST_CASE("assign_all walks fixations in temporal order") {
    VoteRig rig({1, 1, 2, 2, 3, 3});
    EventTimeline timeline;
    EyeMovementEvent f1{0, 200, EventKind::fixation, 0, {{50, 50}}};
    EyeMovementEvent sac{200, 400, EventKind::saccade, 0, {{50, 50}}};
    EyeMovementEvent f2{400, 600, EventKind::fixation, 0, {{50, 50}}};
    timeline.events = {f1, sac, f2};

    const auto assigned = assign_all(timeline, rig.source, rig.framed, rig.track, kCats);
    REQUIRE(assigned.size() == 2);
    CHECK(assigned[0].fix_idx == 0);
    CHECK(assigned[0].object_id == 1); // frames 0,1
    CHECK(assigned[1].fix_idx == 1);
    CHECK(assigned[1].object_id == 3); // frames 4,5
    CHECK(assign_all(EventTimeline{}, rig.source, rig.framed, rig.track, kCats).empty());
}

TEST_CASE("mode equals a brute-force tally and support times votes is the raw count") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> labels;
        const int n = 1 + static_cast<int>(rng.next_below(40));
        for (int i = 0; i < n; ++i) labels.push_back(static_cast<int>(rng.next_below(4)));

        VoteRig rig(labels);
        const auto a = assign_fixation(0, rig.fix, rig.source, rig.framed, rig.track, kCats);

        std::map<int, int> tally;
        for (int lab : labels) ++tally[lab];
        for (const auto& [label, count] : tally) CHECK(a.winner_votes >= count);
        CHECK(tally[a.object_id] == a.winner_votes);
        CHECK(static_cast<int>(std::llround(a.support * a.total_votes)) == a.winner_votes);
    }
}

TEST_CASE("permuting votes within the fixation does not change the winner") {
    SplitMix64 rng(88);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> labels;
        const int n = 3 + static_cast<int>(rng.next_below(20));
        for (int i = 0; i < n; ++i) labels.push_back(static_cast<int>(rng.next_below(4)));
        VoteRig rig(labels);
        const auto a = assign_fixation(0, rig.fix, rig.source, rig.framed, rig.track, kCats);

        std::vector<int> shuffled = labels;
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);
        }
        VoteRig rig2(shuffled);
        const auto b = assign_fixation(0, rig2.fix, rig2.source, rig2.framed, rig2.track, kCats);
        CHECK(a.object_id == b.object_id);
        CHECK(a.support == doctest::Approx(b.support));
    }
}
