#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teamlens/conversation.hpp"
#include "teamlens/eye_contact.hpp"
#include "teamlens/jsonl.hpp"
#include "teamlens/object_fixation.hpp"

namespace teamlens {

struct TransitionMatrix {
    std::vector<std::string> states;          // ordered category list
    std::vector<std::vector<long long>> counts; // counts[a][b]: a then b
    bool include_self = true;

    long long total() const;
    std::optional<std::size_t> state_index(const std::string& state) const;
    bool operator==(const TransitionMatrix&) const = default;
};

// Counts consecutive category pairs in temporal order. With include_self off,
// same-category pairs are skipped.
TransitionMatrix build_transition_matrix(const std::vector<std::string>& category_sequence,
                                         const std::vector<std::string>& states,
                                         bool include_self = true);

// 1 - sum |c[a][b] - c[b][a]| / sum off-diagonal, in [0, 1]; 1 when there are
// no off-diagonal counts.
double symmetry_index(const TransitionMatrix& m);

struct CategoryStats {
    int count = 0;
    double total_s = 0.0;
    double mean_s = 0.0;
};

// Mean/total fixation duration per category. Categories absent from the
// assignments are absent from the map.
std::map<std::string, CategoryStats> avg_fixation_time(
    const std::vector<FixationAssignment>& assignments);

struct LeadershipReport {
    std::string session_id;
    std::string leader_id;

    // null when the session lacked a label source
    std::optional<std::map<std::string, CategoryStats>> fixation;
    std::optional<TransitionMatrix> transition;
    std::optional<double> symmetry;

    // null when the session lacked face tracks or eye contact was disabled
    std::optional<int> ec_total;
    std::optional<std::map<std::string, int>> ec_per_dyad;

    // null when the session lacked a transcript or conversation was disabled
    std::optional<std::map<std::string, double>> conv_ratios; // class name -> percent

    // manual scores echoed verbatim when supplied
    std::optional<std::string> team_score;
    std::optional<std::string> ottawa_score;

    Json params; // full config echo
};

struct ReportInputs {
    std::string session_id;
    std::string leader_id;
    std::vector<std::string> category_states;
    const std::vector<FixationAssignment>* assignments = nullptr;
    const EyeContactSummary* eye_contact = nullptr;
    const std::map<IntentLabel, double>* conv_ratios = nullptr;
    std::optional<std::string> team_score;
    std::optional<std::string> ottawa_score;
    bool include_self = true;
    bool exclude_unknown_state = false;
    Json params;
};

// Missing subsystems become null report sections, never fabricated zeros.
// Throws IncompleteSession when nothing at all is available.
LeadershipReport assemble_report(const ReportInputs& inputs);

Json report_to_json(const LeadershipReport& report);
LeadershipReport report_from_json(const Json& doc);
bool report_equal(const LeadershipReport& a, const LeadershipReport& b);

std::string report_to_markdown(const LeadershipReport& report);
std::string transition_to_csv(const TransitionMatrix& m);

} // namespace teamlens
