#pragma once

#include <optional>
#include <string>
#include <vector>

#include "teamtrace/config.hpp"
#include "teamtrace/context.hpp"
#include "teamtrace/idea.hpp"
#include "teamtrace/lexicon.hpp"

namespace teamtrace {

// Cue lists driving the nature cascade. Phrases match on word boundaries.
struct NatureCues {
    std::vector<std::string> probe = {"check how many", "check length", "how many", "how long"};
    std::vector<std::string> change_verbs = {"change", "shift", "subtract"};
    std::vector<std::string> evaluation = {"might work", "would work", "could work", "will work", "won't work"};
};

// Splits an utterance into one triple per verb clause. Pre-annotated
// utterances bypass extraction and are only lemma-normalized.
// Throws ValidationError on empty text without pre-annotation.
std::vector<IdeaTriple> extract_ideas(const Utterance& u, const Lexicon& lex);

// Lowercases and lemmatizes every token, recomputes the out-of-lexicon flags
// and the assertion_only flag.
IdeaTriple normalize_triple(IdeaTriple t, const Lexicon& lex);

// Fraction of the idea's non-verb lemmas that occur (up to synonyms) in the
// problem statement.
double problem_overlap(const IdeaTriple& idea, const ContextState& ctx, const Lexicon& lex);

// Strongest image cue in the idea's lemmas or clause text, by a fixed priority.
std::optional<MentalImageKind> cue_image(const IdeaTriple& idea, const Lexicon& lex);

NatureKind classify_nature(const IdeaTriple& idea, const ContextState& ctx, const Lexicon& lex,
                           const NatureConfig& cfg = {}, const NatureCues& cues = {});

}  // namespace teamtrace
