#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "teamtrace/config.hpp"
#include "teamtrace/context.hpp"
#include "teamtrace/idea.hpp"
#include "teamtrace/lexicon.hpp"

namespace teamtrace {

class ProcessGraph;

// An idea after the context pipeline: its elements (including synthesized
// outputs), its goals, and how it was read.
struct IdeaFeatures {
    IdeaTriple triple;
    ElementSet elements;
    std::set<std::string> goals;
    NatureKind nature = NatureKind::solving_highlevel;
    MentalImageKind hint = MentalImageKind::desired_solution;

    bool operator==(const IdeaFeatures&) const = default;
};

struct MatchedPair {
    Element a;
    Element b;

    bool operator==(const MatchedPair&) const = default;
};

struct MatchResult {
    std::vector<MatchedPair> matched_pairs;
    ElementSet unmatched_a;
    ElementSet unmatched_b;
    std::vector<MatchedPair> opposites;
    std::array<int, 4> size_a{};  // operand sizes per channel
    std::array<int, 4> size_b{};

    int matched_in(Channel c) const;
    bool operator==(const MatchResult&) const = default;
};

// Channel-respecting maximum matching. Elements pair when their lemmas are
// identical or synonyms; identical pairs are taken first, then lexicographic
// order. Leftover antonym pairs are reported as opposites.
MatchResult match(const ElementSet& a, const ElementSet& b, const Lexicon& lex);

// Weighted matched fraction: verb 0.4, target 0.4, output 0.2, modifier 0.2,
// each against the larger operand in that channel, minus 0.2 per opposite,
// clamped to [0, 1]. Zero when both operands are empty.
double similarity(const MatchResult& m);

double channel_weight(Channel c);

struct IcnMember {
    UtteranceId utterance = 0;
    int ordinal = 0;
    int index = 0;  // position in the session's idea sequence
    ElementSet elements;
    MentalImageKind hint = MentalImageKind::desired_solution;

    bool operator==(const IcnMember&) const = default;
};

// Verb, target (nouns acted upon, with their modifiers) and expected-output
// slots, as lemma multisets.
struct IcnSlots {
    std::map<std::string, int> verbs;
    std::map<std::string, int> targets;
    std::map<std::string, int> expected_outputs;

    bool operator==(const IcnSlots&) const = default;
};

// Idea Cluster Node.
struct Icn {
    IcnId id = 0;
    std::vector<IcnMember> members;
    IcnSlots slots;
    ElementSet te;  // typical elements
    ElementSet ev;  // expected variation
    std::set<std::string> goals;
    MentalImageKind image = MentalImageKind::desired_solution;
    UtteranceId created_at = 0;

    ElementSet all_elements() const;
    bool operator==(const Icn&) const = default;
};

Icn make_icn(IcnId id, const IdeaFeatures& idea, int index, const Lexicon& lex);

// Appends the idea and recomputes slots, TE (classes present in at least
// ceil(n/2) members) and EV (every other member element).
Icn update_te_ev(Icn icn, const IdeaFeatures& idea, int index, const Lexicon& lex);

// Idea-to-cluster similarity: best of the match against TE and against each
// member, so a terse restatement of one member still joins.
double icn_similarity(const ElementSet& idea, const Icn& icn, const Lexicon& lex);

enum class Decision { join, new_detailing, new_exploration, new_root };

std::string_view to_string(Decision d);
std::optional<Decision> decision_from_string(std::string_view s);

struct Assignment {
    Decision decision = Decision::new_root;
    IcnId target = 0;             // joined ICN, detailing parent, or exploration context
    ElementSet detailed_elements; // non-empty for new_detailing
    double score = 0.0;           // best candidate similarity
    IcnId best_candidate = 0;

    bool operator==(const Assignment&) const = default;
};

// Candidate ICNs: those holding immediate-window ideas plus the top-K medium
// tier, ascending by id.
std::vector<IcnId> candidate_icns(const ProcessGraph& graph, const ContextState& ctx, const Thresholds& cfg);

Assignment assign(const IdeaFeatures& idea, const ProcessGraph& graph, const ContextState& ctx,
                  const Thresholds& cfg, const Lexicon& lex);

}  // namespace teamtrace
