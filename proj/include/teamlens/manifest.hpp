#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teamlens/jsonl.hpp"
#include "teamlens/time_ns.hpp"

namespace teamlens {

enum class Role { leader, member };

const char* role_name(Role role);
Role parse_role(const std::string& text);

struct WearerEntry {
    std::string wearer_id;
    Role role = Role::member;
    TimeNs clock_offset_ns = 0; // device clock -> session clock: t_session = t_device + offset
    std::optional<std::string> gaze_path;
    std::optional<std::string> labelmap_path;
    std::optional<std::string> facetrack_path;
    std::optional<std::string> transcript_path;

    bool operator==(const WearerEntry&) const = default;
};

// Closed category set; "unknown" is implicit (object id 0 / background) and
// must never appear as a mapped value.
extern const std::vector<std::string> kKnownCategories;
extern const std::string kUnknownCategory;

struct SessionManifest {
    std::string session_id;
    TimeNs epoch_ns = 0;
    std::string leader_id;
    std::map<int, std::string> category_map; // object_id (>=1) -> category
    std::vector<WearerEntry> wearers;
    std::string notes;

    bool operator==(const SessionManifest&) const = default;

    const WearerEntry& leader() const;
    const WearerEntry* find_wearer(const std::string& wearer_id) const;
    std::vector<const WearerEntry*> members() const;

    // Category of an object id; 0 and unmapped ids resolve to "unknown".
    std::string category_of(int object_id) const;

    // Category state order for reports: mapped categories by first object id,
    // "unknown" last.
    std::vector<std::string> category_order() const;
};

SessionManifest parse_manifest(const std::filesystem::path& path);
SessionManifest manifest_from_json(const Json& doc, const std::string& context);
Json manifest_to_json(const SessionManifest& manifest);

} // namespace teamlens
