#include "teamlens/manifest.hpp"

#include <algorithm>
#include <set>

#include "teamlens/error.hpp"

namespace teamlens {

const std::vector<std::string> kKnownCategories = {"patient", "member", "screen", "device"};
const std::string kUnknownCategory = "unknown";

const char* role_name(Role role) {
    return role == Role::leader ? "leader" : "member";
}

Role parse_role(const std::string& text) {
    if (text == "leader") return Role::leader;
    if (text == "member") return Role::member;
    fail(ErrorCode::BadRecord, "role must be \"leader\" or \"member\", got \"" + text + "\"");
}

const WearerEntry& SessionManifest::leader() const {
    for (const auto& w : wearers) {
        if (w.wearer_id == leader_id) return w;
    }
    fail(ErrorCode::MissingField, "leader_id \"" + leader_id + "\" not among wearers");
}

const WearerEntry* SessionManifest::find_wearer(const std::string& wearer_id) const {
    for (const auto& w : wearers) {
        if (w.wearer_id == wearer_id) return &w;
    }
    return nullptr;
}

std::vector<const WearerEntry*> SessionManifest::members() const {
    std::vector<const WearerEntry*> out;
    for (const auto& w : wearers) {
        if (w.wearer_id != leader_id) out.push_back(&w);
    }
    return out;
}

std::string SessionManifest::category_of(int object_id) const {
    auto it = category_map.find(object_id);
    if (it == category_map.end()) return kUnknownCategory;
    return it->second;
}

std::vector<std::string> SessionManifest::category_order() const {
    std::vector<std::string> order;
    for (const auto& [id, cat] : category_map) { // std::map iterates in id order
        if (std::find(order.begin(), order.end(), cat) == order.end()) order.push_back(cat);
    }
    order.push_back(kUnknownCategory);
    return order;
}

namespace {

std::optional<std::string> optional_path(const Json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

} // namespace

SessionManifest manifest_from_json(const Json& doc, const std::string& context) {
    if (!doc.is_object()) fail(ErrorCode::BadRecord, context + ": manifest must be a JSON object");

    SessionManifest m;
    m.session_id = require_field(doc, "session_id", context).get<std::string>();
    m.epoch_ns = require_field(doc, "epoch_ns", context).get<TimeNs>();
    m.leader_id = require_field(doc, "leader_id", context).get<std::string>();
    if (doc.contains("notes") && doc["notes"].is_string()) m.notes = doc["notes"].get<std::string>();

    const Json& cats = require_field(doc, "category_map", context);
    if (!cats.is_object()) fail(ErrorCode::BadCategoryMap, context + ": category_map must be an object");
    for (const auto& [key, value] : cats.items()) {
        int object_id = 0;
        try {
            size_t pos = 0;
            object_id = std::stoi(key, &pos);
            if (pos != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            fail(ErrorCode::BadCategoryMap, context + ": object id \"" + key + "\" is not an integer");
        }
        if (object_id < 1) {
            fail(ErrorCode::BadCategoryMap,
                 context + ": object id " + key + " must be >= 1 (0 is reserved for background)");
        }
        const std::string category = value.get<std::string>();
        if (category == kUnknownCategory) {
            fail(ErrorCode::BadCategoryMap,
                 context + ": object id " + key + " mapped to \"unknown\", which is implicit only");
        }
        if (std::find(kKnownCategories.begin(), kKnownCategories.end(), category) ==
            kKnownCategories.end()) {
            fail(ErrorCode::BadCategoryMap,
                 context + ": object id " + key + " mapped to unrecognized category \"" + category + "\"");
        }
        m.category_map[object_id] = category;
    }

    const Json& wearers = require_field(doc, "wearers", context);
    if (!wearers.is_array() || wearers.empty()) {
        fail(ErrorCode::MissingField, context + ": missing \"wearers\"");
    }
    std::set<std::string> seen_ids;
    for (const auto& wj : wearers) {
        WearerEntry w;
        w.wearer_id = require_field(wj, "wearer_id", context).get<std::string>();
        if (!seen_ids.insert(w.wearer_id).second) {
            fail(ErrorCode::DuplicateWearer, context + ": wearer_id \"" + w.wearer_id + "\"");
        }
        w.role = parse_role(require_field(wj, "role", context).get<std::string>());
        w.clock_offset_ns = require_field(wj, "clock_offset_ns", context).get<TimeNs>();
        w.gaze_path = optional_path(wj, "gaze");
        w.labelmap_path = optional_path(wj, "labelmaps");
        w.facetrack_path = optional_path(wj, "facetracks");
        w.transcript_path = optional_path(wj, "transcript");

        std::set<std::string> paths;
        for (const auto& p : {w.gaze_path, w.labelmap_path, w.facetrack_path, w.transcript_path}) {
            if (p && !paths.insert(*p).second) {
                fail(ErrorCode::BadRecord,
                     context + ": wearer \"" + w.wearer_id + "\" reuses path \"" + *p + "\"");
            }
        }
        m.wearers.push_back(std::move(w));
    }

    int leader_count = 0;
    for (const auto& w : m.wearers) {
        if (w.wearer_id == m.leader_id) ++leader_count;
    }
    if (leader_count != 1) {
        fail(ErrorCode::MissingField,
             context + ": leader_id \"" + m.leader_id + "\" must match exactly one wearer");
    }
    return m;
}

SessionManifest parse_manifest(const std::filesystem::path& path) {
    return manifest_from_json(read_json_file(path), path.string());
}

Json manifest_to_json(const SessionManifest& m) {
    Json cats = Json::object();
    for (const auto& [id, cat] : m.category_map) cats[std::to_string(id)] = cat;

    Json wearers = Json::array();
    for (const auto& w : m.wearers) {
        Json wj = {
            {"wearer_id", w.wearer_id},
            {"role", role_name(w.role)},
            {"clock_offset_ns", w.clock_offset_ns},
        };
        if (w.gaze_path) wj["gaze"] = *w.gaze_path;
        if (w.labelmap_path) wj["labelmaps"] = *w.labelmap_path;
        if (w.facetrack_path) wj["facetracks"] = *w.facetrack_path;
        if (w.transcript_path) wj["transcript"] = *w.transcript_path;
        wearers.push_back(std::move(wj));
    }

    return Json{
        {"session_id", m.session_id},
        {"epoch_ns", m.epoch_ns},
        {"leader_id", m.leader_id},
        {"category_map", cats},
        {"wearers", wearers},
        {"notes", m.notes},
    };
}

} // namespace teamlens
