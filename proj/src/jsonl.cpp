#include "teamlens/jsonl.hpp"

#include <fstream>

#include "teamlens/error.hpp"

namespace teamlens {

std::vector<JsonlRecord> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::BadRecord, "cannot open " + path.string());

    std::vector<JsonlRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json value = Json::parse(line, nullptr, false);
        if (value.is_discarded()) {
            fail(ErrorCode::BadRecord,
                 path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
        }
        out.push_back({line_no, std::move(value)});
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::BadRecord, "cannot write " + path.string());
    for (const auto& rec : records) {
        out << rec.dump() << "\n";
    }
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::BadRecord, "cannot open " + path.string());
    Json value = Json::parse(in, nullptr, false);
    if (value.is_discarded()) fail(ErrorCode::BadRecord, path.string() + ": invalid JSON");
    return value;
}

void write_json_file(const std::filesystem::path& path, const Json& value, int indent) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::BadRecord, "cannot write " + path.string());
    out << value.dump(indent) << "\n";
}

const Json& require_field(const Json& obj, const std::string& key, const std::string& context) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        fail(ErrorCode::MissingField, context + ": missing \"" + key + "\"");
    }
    return *it;
}

} // namespace teamlens
