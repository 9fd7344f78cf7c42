#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "teamtrace/types.hpp"

namespace teamtrace {

// One extracted idea: noun1 - verb - noun2, plus modifiers.
struct IdeaTriple {
    std::string verb;                  // empty iff assertion_only
    std::optional<std::string> noun1;  // absent for elided subjects
    std::vector<std::string> noun2;
    std::vector<std::string> modifiers;
    UtteranceId source_utterance = 0;
    int ordinal = 0;
    bool assertion_only = false;
    std::vector<std::string> out_of_lexicon;  // sorted, unique
    std::string clause;                        // lowercased surface text the triple came from

    bool operator==(const IdeaTriple&) const = default;
};

struct Utterance {
    UtteranceId id = 0;
    std::string session;
    std::string speaker;
    std::int64_t t_ms = 0;
    std::string text;
    std::optional<std::vector<IdeaTriple>> pre_annotation;

    bool operator==(const Utterance&) const = default;
};

// A lemma in one slot channel.
struct Element {
    Channel channel = Channel::target;
    std::string lemma;

    auto operator<=>(const Element&) const = default;
};

using ElementSet = std::set<Element>;

// verb -> verb channel, noun1/noun2 -> target, modifiers -> modifier,
// `outputs` -> output channel.
ElementSet elements_of(const IdeaTriple& idea, const std::set<std::string>& outputs = {});

std::set<std::string> lemmas_of(const ElementSet& elements);
std::set<std::string> content_lemmas(const IdeaTriple& idea);

}  // namespace teamtrace
