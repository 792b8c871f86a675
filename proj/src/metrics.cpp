#include "teamlens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "teamlens/error.hpp"

namespace teamlens {

long long TransitionMatrix::total() const {
    long long sum = 0;
    for (const auto& row : counts) {
        for (long long c : row) sum += c;
    }
    return sum;
}

std::optional<std::size_t> TransitionMatrix::state_index(const std::string& state) const {
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] == state) return i;
    }
    return std::nullopt;
}

TransitionMatrix build_transition_matrix(const std::vector<std::string>& category_sequence,
                                         const std::vector<std::string>& states,
                                         bool include_self) {
    TransitionMatrix m;
    m.states = states;
    m.include_self = include_self;
    m.counts.assign(states.size(), std::vector<long long>(states.size(), 0));

    for (std::size_t i = 1; i < category_sequence.size(); ++i) {
        const auto from = m.state_index(category_sequence[i - 1]);
        const auto to = m.state_index(category_sequence[i]);
        if (!from || !to) continue; // excluded state (e.g. "unknown" switched off)
        if (!include_self && *from == *to) continue;
        ++m.counts[*from][*to];
    }
    return m;
}

double symmetry_index(const TransitionMatrix& m) {
    long long off_total = 0;
    long long asym = 0;
    for (std::size_t a = 0; a < m.states.size(); ++a) {
        for (std::size_t b = 0; b < m.states.size(); ++b) {
            if (a == b) continue;
            off_total += m.counts[a][b];
            if (a < b) asym += std::llabs(m.counts[a][b] - m.counts[b][a]);
        }
    }
    if (off_total == 0) return 1.0;
    return 1.0 - static_cast<double>(asym) / static_cast<double>(off_total);
}

std::map<std::string, CategoryStats> avg_fixation_time(
    const std::vector<FixationAssignment>& assignments) {
    std::map<std::string, CategoryStats> stats;
    for (const auto& a : assignments) {
        CategoryStats& s = stats[a.category];
        ++s.count;
        s.total_s += ns_to_sec(a.end_ns - a.start_ns);
    }
    for (auto& [cat, s] : stats) s.mean_s = s.total_s / s.count;
    return stats;
}

LeadershipReport assemble_report(const ReportInputs& inputs) {
    if (!inputs.assignments && !inputs.eye_contact && !inputs.conv_ratios) {
        fail(ErrorCode::IncompleteSession,
             "session \"" + inputs.session_id + "\": no fixation, eye-contact, or conversation data");
    }

    LeadershipReport report;
    report.session_id = inputs.session_id;
    report.leader_id = inputs.leader_id;
    report.params = inputs.params;
    report.team_score = inputs.team_score;
    report.ottawa_score = inputs.ottawa_score;

    if (inputs.assignments) {
        report.fixation = avg_fixation_time(*inputs.assignments);

        std::vector<std::string> states = inputs.category_states;
        if (inputs.exclude_unknown_state) {
            states.erase(std::remove(states.begin(), states.end(), "unknown"), states.end());
        }
        std::vector<std::string> sequence;
        sequence.reserve(inputs.assignments->size());
        for (const auto& a : *inputs.assignments) sequence.push_back(a.category);
        report.transition = build_transition_matrix(sequence, states, inputs.include_self);
        report.symmetry = symmetry_index(*report.transition);
    }

    if (inputs.eye_contact) {
        report.ec_total = inputs.eye_contact->total_events;
        std::map<std::string, int> per_dyad;
        for (const auto& dyad : inputs.eye_contact->dyads) {
            per_dyad[dyad.member_id] = static_cast<int>(dyad.events.size());
        }
        report.ec_per_dyad = std::move(per_dyad);
    }

    if (inputs.conv_ratios) {
        std::map<std::string, double> ratios;
        for (const auto& [label, pct] : *inputs.conv_ratios) ratios[intent_name(label)] = pct;
        report.conv_ratios = std::move(ratios);
    }
    return report;
}

namespace {

Json matrix_to_json(const TransitionMatrix& m) {
    return Json{
        {"states", m.states},
        {"counts", m.counts},
        {"include_self", m.include_self},
    };
}

TransitionMatrix matrix_from_json(const Json& doc) {
    TransitionMatrix m;
    m.states = doc.at("states").get<std::vector<std::string>>();
    m.counts = doc.at("counts").get<std::vector<std::vector<long long>>>();
    m.include_self = doc.at("include_self").get<bool>();
    return m;
}

} // namespace

Json report_to_json(const LeadershipReport& report) {
    Json doc;
    doc["session_id"] = report.session_id;
    doc["leader_id"] = report.leader_id;

    if (report.fixation) {
        Json fx = Json::object();
        for (const auto& [cat, s] : *report.fixation) {
            fx[cat] = Json{{"count", s.count}, {"total_s", s.total_s}, {"mean_s", s.mean_s}};
        }
        doc["fixation"] = fx;
    } else {
        doc["fixation"] = nullptr;
    }
    doc["transition"] = report.transition ? matrix_to_json(*report.transition) : Json(nullptr);
    doc["symmetry_index"] = report.symmetry ? Json(*report.symmetry) : Json(nullptr);
    doc["ec_total"] = report.ec_total ? Json(*report.ec_total) : Json(nullptr);
    doc["ec_per_dyad"] = report.ec_per_dyad ? Json(*report.ec_per_dyad) : Json(nullptr);
    doc["conversation_ratio_pct"] = report.conv_ratios ? Json(*report.conv_ratios) : Json(nullptr);
    doc["team_score"] = report.team_score ? Json(*report.team_score) : Json(nullptr);
    doc["ottawa_score"] = report.ottawa_score ? Json(*report.ottawa_score) : Json(nullptr);
    doc["params"] = report.params;
    return doc;
}

LeadershipReport report_from_json(const Json& doc) {
    LeadershipReport report;
    report.session_id = doc.at("session_id").get<std::string>();
    report.leader_id = doc.at("leader_id").get<std::string>();
    if (!doc.at("fixation").is_null()) {
        std::map<std::string, CategoryStats> fx;
        for (const auto& [cat, sj] : doc.at("fixation").items()) {
            CategoryStats s;
            s.count = sj.at("count").get<int>();
            s.total_s = sj.at("total_s").get<double>();
            s.mean_s = sj.at("mean_s").get<double>();
            fx[cat] = s;
        }
        report.fixation = std::move(fx);
    }
    if (!doc.at("transition").is_null()) report.transition = matrix_from_json(doc.at("transition"));
    if (!doc.at("symmetry_index").is_null()) report.symmetry = doc.at("symmetry_index").get<double>();
    if (!doc.at("ec_total").is_null()) report.ec_total = doc.at("ec_total").get<int>();
    if (!doc.at("ec_per_dyad").is_null()) {
        report.ec_per_dyad = doc.at("ec_per_dyad").get<std::map<std::string, int>>();
    }
    if (!doc.at("conversation_ratio_pct").is_null()) {
        report.conv_ratios = doc.at("conversation_ratio_pct").get<std::map<std::string, double>>();
    }
    if (!doc.at("team_score").is_null()) report.team_score = doc.at("team_score").get<std::string>();
    if (!doc.at("ottawa_score").is_null()) {
        report.ottawa_score = doc.at("ottawa_score").get<std::string>();
    }
    report.params = doc.at("params");
    return report;
}

bool report_equal(const LeadershipReport& a, const LeadershipReport& b) {
    return report_to_json(a) == report_to_json(b);
}

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

std::string report_to_markdown(const LeadershipReport& report) {
    std::ostringstream out;
    out << "# Session " << report.session_id << ", leader " << report.leader_id << "\n\n";

    if (report.team_score || report.ottawa_score) {
        out << "Human evaluation: TEAM " << report.team_score.value_or("-") << ", Ottawa "
            << report.ottawa_score.value_or("-") << "\n\n";
    }

    out << "## Average object fixation time (s)\n\n";
    if (report.fixation) {
        out << "| Category | Mean (s) | Count | Total (s) |\n";
        out << "|---|---|---|---|\n";
        const std::vector<std::string> order = {"patient", "member", "screen", "device", "unknown"};
        auto emit = [&](const std::string& cat, const CategoryStats& s) {
            out << "| " << cat << " | " << fmt2(s.mean_s) << " | " << s.count << " | "
                << fmt2(s.total_s) << " |\n";
        };
        for (const auto& cat : order) {
            auto it = report.fixation->find(cat);
            if (it != report.fixation->end()) emit(cat, it->second);
        }
        for (const auto& [cat, s] : *report.fixation) {
            if (std::find(order.begin(), order.end(), cat) == order.end()) emit(cat, s);
        }
    } else {
        out << "_no label source supplied_\n";
    }

    out << "\n## Fixation transitions\n\n";
    if (report.transition) {
        const TransitionMatrix& m = *report.transition;
        out << "| from \\ to |";
        for (const auto& s : m.states) out << " " << s << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < m.states.size(); ++i) out << "---|";
        out << "\n";
        for (std::size_t a = 0; a < m.states.size(); ++a) {
            out << "| " << m.states[a] << " |";
            for (std::size_t b = 0; b < m.states.size(); ++b) out << " " << m.counts[a][b] << " |";
            out << "\n";
        }
        out << "\nSymmetry index: " << fmt2(report.symmetry.value_or(1.0)) << "\n";
    } else {
        out << "_no label source supplied_\n";
    }

    out << "\n## Eye contact\n\n";
    if (report.ec_total) {
        out << "Total events: " << *report.ec_total << "\n\n";
        if (report.ec_per_dyad) {
            for (const auto& [member, n] : *report.ec_per_dyad) {
                out << "- with " << member << ": " << n << "\n";
            }
        }
    } else {
        out << "_no face tracks supplied_\n";
    }

    out << "\n## Conversation category ratio (%)\n\n";
    if (report.conv_ratios) {
        out << "| DO | UO | PL | TA |\n|---|---|---|---|\n|";
        for (const char* cls : {"DO", "UO", "PL", "TA"}) {
            auto it = report.conv_ratios->find(cls);
            out << " " << (it != report.conv_ratios->end() ? fmt2(it->second) : "-") << " |";
        }
        out << "\n";
    } else {
        out << "_no transcript supplied_\n";
    }
    return out.str();
}

std::string transition_to_csv(const TransitionMatrix& m) {
    std::ostringstream out;
    out << "from\\to";
    for (const auto& s : m.states) out << "," << s;
    out << "\n";
    for (std::size_t a = 0; a < m.states.size(); ++a) {
        out << m.states[a];
        for (std::size_t b = 0; b < m.states.size(); ++b) out << "," << m.counts[a][b];
        out << "\n";
    }
    return out.str();
}

} // namespace teamlens
