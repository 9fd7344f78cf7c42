#pragma once

#include <map>
#include <string>
#include <vector>

#include "teamtrace/config.hpp"
#include "teamtrace/context.hpp"
#include "teamtrace/graph.hpp"
#include "teamtrace/icn.hpp"

namespace teamtrace {

// How one idea entered the graph. The session history is a list of these.
struct IdeaRecord {
    int index = 0;
    UtteranceId utterance = 0;
    int ordinal = 0;
    IcnId icn = 0;
    Decision decision = Decision::new_root;
    IcnId target = 0;
    double score = 0.0;
    double te_similarity = 0.0;      // against the joined ICN's TE before joining
    bool added_new_element = true;   // introduced an element class the ICN lacked
    NatureKind nature = NatureKind::solving_highlevel;
    MentalImageKind hint = MentalImageKind::desired_solution;

    bool operator==(const IdeaRecord&) const = default;
};

struct FulfilledRequirements {
    int count = 0;
    double ratio = 0.0;
    std::vector<std::string> evidence;
    bool operator==(const FulfilledRequirements&) const = default;
};
struct ExplorationMetric {
    int alternative_count = 0;
    int switch_count = 0;
    std::vector<std::string> evidence;
    bool operator==(const ExplorationMetric&) const = default;
};
struct SubstantiatedDecisions {
    double ratio = 0.0;
    int orphan_count = 0;
    bool operator==(const SubstantiatedDecisions&) const = default;
};
struct BacktrackingMetric {
    int count = 0;
    int resolved_count = 0;
    bool operator==(const BacktrackingMetric&) const = default;
};
struct ContradictionPair {
    Element a;
    Element b;
    IcnId icn_a = 0;
    IcnId icn_b = 0;
    std::string reason;  // "antonym" or "te_conflict"
    bool operator==(const ContradictionPair&) const = default;
};
struct ContradictionMetric {
    int count = 0;
    std::vector<ContradictionPair> pairs;
    bool operator==(const ContradictionMetric&) const = default;
};
struct RepetitionMetric {
    int count = 0;
    int productive_count = 0;
    bool operator==(const RepetitionMetric&) const = default;
};
struct UnconsideredNeeds {
    int count = 0;
    ElementSet elements;
    bool operator==(const UnconsideredNeeds&) const = default;
};
struct UnexploredItems {
    int count = 0;
    std::vector<IcnId> icn_ids;
    bool operator==(const UnexploredItems&) const = default;
};

struct MetricsReport {
    FulfilledRequirements fulfilled_requirements;
    ExplorationMetric exploration;
    SubstantiatedDecisions substantiated_decisions;
    BacktrackingMetric backtracking;
    ContradictionMetric contradictions;
    RepetitionMetric repetitions;
    UnconsideredNeeds unconsidered_needs;
    UnexploredItems unexplored_items;
    UtteranceId at_utterance = 0;

    bool operator==(const MetricsReport&) const = default;
};

MetricsReport compute(const ProcessGraph& g, const ContextState& ctx, const std::vector<IdeaRecord>& history,
                      const Lexicon& lex, const MetricsConfig& cfg = {}, UtteranceId at_utterance = 0);

struct MetricsDelta {
    UtteranceId from = 0;
    UtteranceId to = 0;
    std::map<std::string, double> changes;  // dotted field -> signed difference
    std::vector<std::string> new_evidence;

    bool zero() const;
    bool operator==(const MetricsDelta&) const = default;
};

// Throws ValidationError when `prev` is later than `cur`.
MetricsDelta delta_report(const MetricsReport& prev, const MetricsReport& cur);

}  // namespace teamtrace
