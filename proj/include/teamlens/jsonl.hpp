#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace teamlens {

using Json = nlohmann::json;

struct JsonlRecord {
    int line; // 1-based line in the source file
    Json value;
};

// Reads newline-delimited JSON. Blank lines are skipped; a malformed line
// throws Error(BadRecord) naming the file and line.
std::vector<JsonlRecord> read_jsonl(const std::filesystem::path& path);

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& value, int indent = 2);

// Fetches a required key; throws Error(MissingField) naming it.
const Json& require_field(const Json& obj, const std::string& key, const std::string& context);

} // namespace teamlens
