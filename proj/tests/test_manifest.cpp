#include <doctest.h>

#include "helpers.hpp"
#include "teamlens/error.hpp"
#include "teamlens/manifest.hpp"

using namespace teamlens;
using testutil::TempDir;
using testutil::write_file;

namespace {

Json minimal_manifest() {
    return Json{
        {"session_id", "s1"},
        {"epoch_ns", 0},
        {"leader_id", "w1"},
        {"category_map", Json{{"1", "patient"}}},
        {"wearers", Json::array({Json{{"wearer_id", "w1"},
                                      {"role", "leader"},
                                      {"clock_offset_ns", 0},
                                      {"gaze", "gaze.jsonl"}}})},
    };
}

} // namespace

TEST_CASE("minimal one-wearer manifest parses") {
    TempDir dir("manifest");
    write_file(dir / "m.json", minimal_manifest().dump());
    const SessionManifest m = parse_manifest(dir / "m.json");
    CHECK(m.session_id == "s1");
    CHECK(m.wearers.size() == 1);
    CHECK(m.leader().wearer_id == "w1");
    CHECK(m.category_of(1) == "patient");
    CHECK(m.category_of(0) == "unknown");
}

TEST_CASE("duplicate wearer id is rejected") {
    Json doc = minimal_manifest();
    doc["wearers"].push_back(doc["wearers"][0]);
    try {
        manifest_from_json(doc, "test");
        FAIL("expected DuplicateWearer");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateWearer);
        CHECK(e.detail().find("w1") != std::string::npos);
    }
}

TEST_CASE("four-wearer session with one leader and three members") {
    Json doc = minimal_manifest();
    doc["leader_id"] = "leader";
    doc["wearers"] = Json::array();
    for (const std::string id : {"leader", "nurse", "assistant1", "assistant2"}) {
        doc["wearers"].push_back(Json{{"wearer_id", id},
                                      {"role", id == "leader" ? "leader" : "member"},
                                      {"clock_offset_ns", 0}});
    }
    const SessionManifest m = manifest_from_json(doc, "test");
    CHECK(m.wearers.size() == 4);
    CHECK(m.leader_id == "leader");
    CHECK(m.members().size() == 3);
}

TEST_CASE("missing required field names the key") {
    Json doc = minimal_manifest();
    doc.erase("leader_id");
    try {
        manifest_from_json(doc, "test");
        FAIL("expected MissingField");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingField);
        CHECK(e.detail().find("leader_id") != std::string::npos);
    }
}

TEST_CASE("leader_id must match exactly one wearer") {
    Json doc = minimal_manifest();
    doc["leader_id"] = "ghost";
    CHECK_THROWS_AS(manifest_from_json(doc, "test"), Error);
}

TEST_CASE("category map rejections") {
    SUBCASE("object id 0 is reserved") {
        Json doc = minimal_manifest();
        doc["category_map"] = Json{{"0", "patient"}};
        try {
            manifest_from_json(doc, "test");
            FAIL("expected BadCategoryMap");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BadCategoryMap);
        }
    }
    SUBCASE("unknown is implicit, never mapped") {
        Json doc = minimal_manifest();
        doc["category_map"]["2"] = "unknown";
        CHECK_THROWS_AS(manifest_from_json(doc, "test"), Error);
    }
    SUBCASE("category outside the closed set") {
        Json doc = minimal_manifest();
        doc["category_map"]["2"] = "kettle";
        try {
            manifest_from_json(doc, "test");
            FAIL("expected BadCategoryMap");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BadCategoryMap);
            CHECK(e.detail().find("kettle") != std::string::npos);
        }
    }
    SUBCASE("non-integer object id") {
        Json doc = minimal_manifest();
        doc["category_map"] = Json{{"one", "patient"}};
        CHECK_THROWS_AS(manifest_from_json(doc, "test"), Error);
    }
}

TEST_CASE("manifest serialization round-trips") {
    Json doc = minimal_manifest();
    doc["category_map"]["2"] = "member";
    doc["category_map"]["3"] = "screen";
    doc["notes"] = "session one";
    doc["wearers"][0]["labelmaps"] = "lm.jsonl";
    doc["wearers"].push_back(Json{{"wearer_id", "w2"},
                                  {"role", "member"},
                                  {"clock_offset_ns", -37000000},
                                  {"gaze", "g2.jsonl"},
                                  {"facetracks", "f2.jsonl"}});
    const SessionManifest parsed = manifest_from_json(doc, "test");
    const SessionManifest reparsed = manifest_from_json(manifest_to_json(parsed), "roundtrip");
    CHECK(parsed == reparsed);
}

TEST_CASE("category order is id order with unknown last") {
    Json doc = minimal_manifest();
    doc["category_map"] = Json{{"1", "patient"}, {"2", "member"}, {"3", "member"},
                               {"4", "screen"}, {"5", "device"}};
    const SessionManifest m = manifest_from_json(doc, "test");
    const std::vector<std::string> expected = {"patient", "member", "screen", "device", "unknown"};
    CHECK(m.category_order() == expected);
}

TEST_CASE("wearer paths must be distinct") {
    Json doc = minimal_manifest();
    doc["wearers"][0]["labelmaps"] = "gaze.jsonl"; // same as gaze path
    CHECK_THROWS_AS(manifest_from_json(doc, "test"), Error);
}
