#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teamlens/jsonl.hpp"
#include "teamlens/time_ns.hpp"

namespace teamlens {

// Leader utterance intent classes; NONE covers everything else.
enum class IntentLabel { DO, UO, PL, TA, NONE };

const char* intent_name(IntentLabel label);
std::optional<IntentLabel> intent_from_string(const std::string& text);
std::vector<IntentLabel> intent_classes(); // DO, UO, PL, TA (NONE excluded)

enum class LabelSource_ { annotation, rule, external, unset };

struct Utterance {
    TimeNs start_ns = 0;
    TimeNs end_ns = 0;
    std::string speaker;
    std::string text;
    std::optional<IntentLabel> label;
    LabelSource_ label_source = LabelSource_::unset;
};

// Transcript records are {"start_ns","end_ns","speaker","text","label"?};
// pre-labeled records keep their labels (source = annotation). Output sorted
// by start_ns.
std::vector<Utterance> load_transcript(const std::filesystem::path& path, TimeNs clock_offset_ns);

struct Rule {
    std::string pattern; // matched as a case-insensitive substring
    double weight = 1.0;
};

struct RuleSet {
    std::string language = "en";
    std::map<IntentLabel, std::vector<Rule>> rules;
};

// Keyword rule sets for the bundled languages ("en", "ja").
RuleSet builtin_rules(const std::string& language);

// Highest cumulative matched weight wins; no match is NONE. Ties resolve in
// class order DO, UO, PL, TA.
Utterance classify_rule(const Utterance& utt, const RuleSet& rules);

struct AdapterConfig {
    enum class Transport { subprocess, http };
    Transport transport = Transport::subprocess;
    std::vector<std::string> command; // subprocess argv
    std::string url;                  // http base, e.g. http://127.0.0.1:8200
    double timeout_s = 30.0;
};

// The fixed instruction sent with every request.
extern const char* kAdapterInstruction;

Json adapter_request(int id, const std::string& text);

// Sends each utterance to the external classifier and returns the labeled
// copy, order preserved. Responses outside the label set map to NONE with a
// warning on stderr. AdapterUnreachable / MalformedResponse throw without
// touching the inputs.
std::vector<Utterance> classify_external(const std::vector<Utterance>& utts,
                                         const AdapterConfig& config);

// Percent of the leader's utterances per class; NONE counts in the
// denominator only. Unlabeled leader utterances count as NONE.
std::map<IntentLabel, double> category_ratios(const std::vector<Utterance>& utts,
                                              const std::string& leader_id);

std::vector<Json> utterances_to_jsonl(const std::vector<Utterance>& utts);

} // namespace teamlens
