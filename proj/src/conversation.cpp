#include "teamlens/conversation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <iostream>

#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>

#include "teamlens/error.hpp"

namespace teamlens {

const char* intent_name(IntentLabel label) {
    switch (label) {
    case IntentLabel::DO: return "DO";
    case IntentLabel::UO: return "UO";
    case IntentLabel::PL: return "PL";
    case IntentLabel::TA: return "TA";
    case IntentLabel::NONE: return "NONE";
    }
    return "NONE";
}

std::optional<IntentLabel> intent_from_string(const std::string& text) {
    if (text == "DO") return IntentLabel::DO;
    if (text == "UO") return IntentLabel::UO;
    if (text == "PL") return IntentLabel::PL;
    if (text == "TA") return IntentLabel::TA;
    if (text == "NONE") return IntentLabel::NONE;
    return std::nullopt;
}

std::vector<IntentLabel> intent_classes() {
    return {IntentLabel::DO, IntentLabel::UO, IntentLabel::PL, IntentLabel::TA};
}

std::vector<Utterance> load_transcript(const std::filesystem::path& path, TimeNs clock_offset_ns) {
    std::vector<Utterance> utts;
    for (const auto& rec : read_jsonl(path)) {
        const std::string context = path.string() + ":" + std::to_string(rec.line);
        if (!rec.value.is_object()) fail(ErrorCode::BadRecord, context + ": expected an object");
        Utterance u;
        u.start_ns = require_field(rec.value, "start_ns", context).get<TimeNs>() + clock_offset_ns;
        u.end_ns = require_field(rec.value, "end_ns", context).get<TimeNs>() + clock_offset_ns;
        if (u.start_ns > u.end_ns) fail(ErrorCode::BadRecord, context + ": start_ns > end_ns");
        u.speaker = require_field(rec.value, "speaker", context).get<std::string>();
        u.text = require_field(rec.value, "text", context).get<std::string>();
        if (rec.value.contains("label") && !rec.value["label"].is_null()) {
            const std::string raw = rec.value["label"].get<std::string>();
            const auto label = intent_from_string(raw);
            if (!label) fail(ErrorCode::BadRecord, context + ": unknown label \"" + raw + "\"");
            u.label = label;
            u.label_source = LabelSource_::annotation;
        }
        utts.push_back(std::move(u));
    }
    std::stable_sort(utts.begin(), utts.end(),
                     [](const Utterance& a, const Utterance& b) { return a.start_ns < b.start_ns; });
    return utts;
}

namespace {

std::string lower_ascii(const std::string& text) {
    std::string out = text;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

RuleSet builtin_rules(const std::string& language) {
    RuleSet set;
    set.language = language;
    if (language == "ja") {
        set.rules[IntentLabel::DO] = {{"してください", 2}, {"して下さい", 2}, {"やって", 2},
                                      {"投与して", 2},     {"お願いします", 1}, {"さん、", 1}};
        set.rules[IntentLabel::UO] = {{"誰か", 2}, {"どなたか", 2}, {"が必要", 1}};
        set.rules[IntentLabel::PL] = {{"次は", 2}, {"その後", 2}, {"準備", 1}, {"計画", 2}, {"もし", 1}};
        set.rules[IntentLabel::TA] = {{"担当", 2}, {"任せ", 2}, {"係", 1}};
        return set;
    }
    set.language = "en";
    set.rules[IntentLabel::DO] = {{"give ", 2}, {"push ", 2}, {"start ", 2}, {"stop ", 2},
                                  {"inject", 2}, {"now", 1},  {"please", 1}};
    set.rules[IntentLabel::UO] = {{"someone", 2}, {"anyone", 2}, {"somebody", 2}, {"we need", 1}};
    set.rules[IntentLabel::PL] = {{"plan", 2}, {"next we", 2}, {"after that", 2}, {"prepare", 1},
                                  {"if ", 1}};
    set.rules[IntentLabel::TA] = {{"you handle", 2}, {"in charge", 2}, {"your job", 2},
                                  {"take care of", 1}, {"assign", 1}};
    return set;
}

Utterance classify_rule(const Utterance& utt, const RuleSet& rules) {
    Utterance out = utt;
    const std::string text = lower_ascii(utt.text);

    IntentLabel best = IntentLabel::NONE;
    double best_score = 0.0;
    for (IntentLabel cls : intent_classes()) {
        auto it = rules.rules.find(cls);
        if (it == rules.rules.end()) continue;
        double score = 0.0;
        for (const auto& rule : it->second) {
            if (!rule.pattern.empty() && text.find(lower_ascii(rule.pattern)) != std::string::npos) {
                score += rule.weight;
            }
        }
        if (score > best_score) {
            best_score = score;
            best = cls;
        }
    }
    out.label = best_score > 0.0 ? best : IntentLabel::NONE;
    out.label_source = LabelSource_::rule;
    return out;
}

const char* kAdapterInstruction =
    "Classify the utterance into exactly one of: DO (direct order to a named person), "
    "UO (undirected order to the room), PL (planning), TA (task assignment), NONE (anything else). "
    "Reply with the label only.";

Json adapter_request(int id, const std::string& text) {
    return Json{
        {"id", id},
        {"text", text},
        {"labels", Json::array({"DO", "UO", "PL", "TA", "NONE"})},
        {"instruction", kAdapterInstruction},
    };
}

namespace {

IntentLabel parse_adapter_label(const Json& response, int expected_id) {
    if (!response.is_object() || !response.contains("id") || !response.contains("label")) {
        fail(ErrorCode::MalformedResponse, "response must carry id and label");
    }
    if (response["id"].get<int>() != expected_id) {
        fail(ErrorCode::MalformedResponse,
             "response id " + response["id"].dump() + " != request id " + std::to_string(expected_id));
    }
    const std::string raw = response["label"].get<std::string>();
    const auto label = intent_from_string(raw);
    if (!label) {
        std::cerr << "warning: adapter label \"" << raw << "\" outside the label set; using NONE\n";
        return IntentLabel::NONE;
    }
    return *label;
}

class SubprocessPipe {
public:
    explicit SubprocessPipe(const std::vector<std::string>& command) {
        if (command.empty()) fail(ErrorCode::AdapterUnreachable, "empty adapter command");
        int to_child[2];
        int from_child[2];
        if (pipe(to_child) != 0 || pipe(from_child) != 0) {
            fail(ErrorCode::AdapterUnreachable, "pipe() failed");
        }
        pid_ = fork();
        if (pid_ < 0) fail(ErrorCode::AdapterUnreachable, "fork() failed");
        if (pid_ == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            std::vector<char*> argv;
            for (const auto& arg : command) argv.push_back(const_cast<char*>(arg.c_str()));
            argv.push_back(nullptr);
            execvp(argv[0], argv.data());
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        write_fd_ = to_child[1];
        reader_ = fdopen(from_child[0], "r");
        if (!reader_) fail(ErrorCode::AdapterUnreachable, "fdopen() failed");
    }

    ~SubprocessPipe() {
        if (write_fd_ >= 0) close(write_fd_);
        if (reader_) fclose(reader_);
        if (pid_ > 0) {
            int status = 0;
            waitpid(pid_, &status, 0);
        }
    }

    // One request line out, one response line back (lockstep keeps the pipe
    // buffers small regardless of batch size).
    std::string round_trip(const std::string& request_line) {
        const std::string line = request_line + "\n";
        std::size_t written = 0;
        while (written < line.size()) {
            const ssize_t n = write(write_fd_, line.data() + written, line.size() - written);
            if (n <= 0) fail(ErrorCode::AdapterUnreachable, "adapter closed its input");
            written += static_cast<std::size_t>(n);
        }
        char* buf = nullptr;
        std::size_t cap = 0;
        const ssize_t len = getline(&buf, &cap, reader_);
        if (len < 0) {
            free(buf);
            fail(ErrorCode::AdapterUnreachable, "adapter produced no response");
        }
        std::string out(buf, static_cast<std::size_t>(len));
        free(buf);
        while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
        return out;
    }

private:
    pid_t pid_ = -1;
    int write_fd_ = -1;
    FILE* reader_ = nullptr;
};

std::vector<Utterance> classify_via_subprocess(const std::vector<Utterance>& utts,
                                               const AdapterConfig& config) {
    SubprocessPipe pipe(config.command);
    std::vector<Utterance> out;
    out.reserve(utts.size());
    for (std::size_t i = 0; i < utts.size(); ++i) {
        const std::string reply = pipe.round_trip(adapter_request(static_cast<int>(i), utts[i].text).dump());
        Json parsed = Json::parse(reply, nullptr, false);
        if (parsed.is_discarded()) {
            fail(ErrorCode::MalformedResponse, "adapter reply is not JSON: " + reply);
        }
        Utterance u = utts[i];
        u.label = parse_adapter_label(parsed, static_cast<int>(i));
        u.label_source = LabelSource_::external;
        out.push_back(std::move(u));
    }
    return out;
}

std::vector<Utterance> classify_via_http(const std::vector<Utterance>& utts,
                                         const AdapterConfig& config) {
    httplib::Client client(config.url);
    client.set_connection_timeout(static_cast<int>(config.timeout_s), 0);
    client.set_read_timeout(static_cast<int>(config.timeout_s), 0);

    Json batch = Json::array();
    for (std::size_t i = 0; i < utts.size(); ++i) {
        batch.push_back(adapter_request(static_cast<int>(i), utts[i].text));
    }
    auto res = client.Post("/classify", batch.dump(), "application/json");
    if (!res || res->status != 200) {
        fail(ErrorCode::AdapterUnreachable, "POST " + config.url + "/classify failed");
    }
    Json parsed = Json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array() || parsed.size() != utts.size()) {
        fail(ErrorCode::MalformedResponse, "expected a response array of size " +
                                               std::to_string(utts.size()));
    }
    std::vector<Utterance> out;
    out.reserve(utts.size());
    for (std::size_t i = 0; i < utts.size(); ++i) {
        Utterance u = utts[i];
        u.label = parse_adapter_label(parsed[i], static_cast<int>(i));
        u.label_source = LabelSource_::external;
        out.push_back(std::move(u));
    }
    return out;
}

} // namespace

std::vector<Utterance> classify_external(const std::vector<Utterance>& utts,
                                         const AdapterConfig& config) {
    if (utts.empty()) return {};
    return config.transport == AdapterConfig::Transport::http ? classify_via_http(utts, config)
                                                              : classify_via_subprocess(utts, config);
}

std::map<IntentLabel, double> category_ratios(const std::vector<Utterance>& utts,
                                              const std::string& leader_id) {
    std::size_t leader_total = 0;
    std::map<IntentLabel, std::size_t> counts;
    for (const auto& u : utts) {
        if (u.speaker != leader_id) continue;
        ++leader_total;
        const IntentLabel label = u.label.value_or(IntentLabel::NONE);
        if (label != IntentLabel::NONE) ++counts[label];
    }
    if (leader_total == 0) fail(ErrorCode::NoLeaderUtterances, "speaker \"" + leader_id + "\"");

    std::map<IntentLabel, double> ratios;
    for (IntentLabel cls : intent_classes()) {
        ratios[cls] = 100.0 * static_cast<double>(counts[cls]) / static_cast<double>(leader_total);
    }
    return ratios;
}

std::vector<Json> utterances_to_jsonl(const std::vector<Utterance>& utts) {
    std::vector<Json> records;
    records.reserve(utts.size());
    for (const auto& u : utts) {
        Json rec = {
            {"start_ns", u.start_ns},
            {"end_ns", u.end_ns},
            {"speaker", u.speaker},
            {"text", u.text},
        };
        if (u.label) rec["label"] = intent_name(*u.label);
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace teamlens
