#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "teamtrace/config.hpp"
#include "teamtrace/idea.hpp"
#include "teamtrace/lexicon.hpp"

namespace teamtrace {

class ProcessGraph;

// Concept network activated by the first noun of an incoming idea.
struct ConceptActivation {
    std::map<std::string, double> activated;  // lemma -> weight in [0, 1]
    std::string source;

    bool operator==(const ConceptActivation&) const = default;
};

struct ImmediateEntry {
    IdeaTriple idea;
    IcnId icn = 0;
    double weight = 1.0;
    std::set<std::string> goals;

    bool operator==(const ImmediateEntry&) const = default;
};

struct MediumEntry {
    IcnId icn = 0;
    std::set<std::string> te_lemmas;
    double score = 0.0;

    bool operator==(const MediumEntry&) const = default;
};

// Three-tier context. The long-term tier is the session's Lexicon, passed
// explicitly to every operation instead of being stored here.
struct ContextState {
    std::vector<ImmediateEntry> immediate;  // oldest first
    std::vector<MediumEntry> medium;        // ranked, best first
    ConceptActivation activation;
    ElementSet problem;                     // elements of the problem statement

    bool operator==(const ContextState&) const = default;
};

struct RelationSet {
    std::vector<RelationTemplate> relations;

    std::set<std::string> outputs() const;
    std::set<std::string> goals() const;
    bool operator==(const RelationSet&) const = default;
};

ConceptActivation activate_concepts(const std::string& trigger, const Lexicon& lex,
                                    const ContextConfig& cfg = {});

// Decays the immediate window, boosts entries overlapping the activation,
// evicts faded entries and re-ranks the medium tier.
ContextState adjust_work_context(const ConceptActivation& act, ContextState ctx, const ContextConfig& cfg = {});

RelationSet activate_relations(const std::string& verb, const ContextState& ctx, const Lexicon& lex);

// Appends the idea to the immediate window, dropping the oldest past capacity.
ContextState advance(ContextState ctx, const IdeaTriple& idea, IcnId icn, std::set<std::string> goals = {},
                     const ContextConfig& cfg = {});

// Rebuilds the medium tier from the graph's live ICNs, keeping current scores
// for ICNs already present and ordering by (score desc, id asc).
void sync_medium(ContextState& ctx, const ProcessGraph& graph);

// Removes every reference to `icn` from the context.
void forget_icn(ContextState& ctx, IcnId icn);

// Lemma that triggers concept activation: noun1, else first noun2, else the
// first modifier, else the verb.
std::string activation_trigger(const IdeaTriple& idea);

}  // namespace teamtrace
