#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "teamtrace/session.hpp"

namespace tt_test {

using namespace teamtrace;

std::filesystem::path data_dir();
std::string read_file(const std::filesystem::path& p);

struct Golden {
    std::shared_ptr<const Lexicon> lex;
    SessionConfig cfg;
    Transcript transcript;
};

const Golden& golden();

// Feeds every utterance; returns the session.
std::unique_ptr<Session> run(const Transcript& t, std::shared_ptr<const Lexicon> lex, const SessionConfig& cfg);

// Index of the ICN holding the idea of utterance `u` (ordinal 0).
IcnId icn_of(const Snapshot& s, UtteranceId u, int ordinal = 0);

// 30 lemmas: 6 verbs, 14 nouns, 8 modifiers, 2 goals. Antonyms never touch
// outputs or goals, so the adjustment loop stays idle on random transcripts.
std::shared_ptr<const Lexicon> random_lexicon(std::uint32_t seed);

// Pre-annotated transcript of at most `max_ideas` ideas, one or two per utterance.
Transcript random_transcript(std::uint32_t seed, const Lexicon& lex, int max_ideas = 12);

// Independent step-by-step re-derivation of the assignment decisions.
struct OracleStep {
    Decision decision = Decision::new_root;
    IcnId target = 0;
    IcnId icn = 0;
    ElementSet detailed;
    double score = 0.0;
};

class Oracle {
public:
    Oracle(const Lexicon& lex, const SessionConfig& cfg) : lex_(lex), cfg_(cfg) {}
    OracleStep step(const IdeaTriple& t);

    // Exhaustive maximum matching size per channel plus opposites, scored.
    double similarity(const ElementSet& a, const ElementSet& b) const;

private:
    struct Idea {
        IdeaTriple triple;
        ElementSet elements;
        std::set<std::string> goals;
    };
    struct Cluster {
        IcnId id = 0;
        std::vector<int> members;
        ElementSet te, ev;
        std::set<std::string> goals;
        std::optional<IcnId> detail_parent, explore_parent;
    };
    struct Entry {
        int idea = 0;
        IcnId icn = 0;
        double weight = 1.0;
    };
    struct Ranked {
        IcnId icn = 0;
        double score = 0.0;
    };

    void recount(Cluster& c) const;
    IcnId context_of(IcnId id) const;

    const Lexicon& lex_;
    SessionConfig cfg_;
    std::vector<Idea> ideas_;
    std::map<IcnId, Cluster> clusters_;
    std::vector<Entry> window_;
    std::vector<Ranked> medium_;
};

// Violations of the structural invariants, empty when all hold.
std::vector<std::string> check_invariants(const Snapshot& s, const std::vector<SessionEvent>& log, const Lexicon& lex,
                                          const SessionConfig& cfg);

}  // namespace tt_test
