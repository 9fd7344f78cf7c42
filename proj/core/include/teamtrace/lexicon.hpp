#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "teamtrace/types.hpp"

namespace teamtrace {

// One meaning a verb can take: which objects it expects, what it produces,
// and which goal it serves.
struct RelationTemplate {
    std::string verb;
    std::set<std::string> object_class;
    std::optional<std::string> output;
    std::optional<std::string> goal;

    std::set<std::string> lemmas() const;
    auto operator<=>(const RelationTemplate&) const = default;
};

// Long-term knowledge used to normalize and relate ideas.
//
// Built by parse_lexicon()/load_lexicon(), which validate it; the public data
// members are read-only in practice once a session holds the lexicon.
class Lexicon {
public:
    std::map<std::string, std::string> lemmas;             // surface form (may contain spaces) -> lemma
    std::vector<std::set<std::string>> synonym_sets;
    std::set<std::pair<std::string, std::string>> antonym_pairs;  // stored in both orders
    std::set<std::string> stopwords;
    std::map<std::string, int> abstraction_rank;           // 0 = most abstract
    std::map<std::string, std::vector<RelationTemplate>> verb_relations;
    std::map<std::string, MentalImageKind> image_cues;     // lemma or phrase -> hint

    // Rebuilds derived lookups; call after mutating the public maps.
    void reindex();

    std::string lemma_of(std::string_view surface) const;
    bool is_known(std::string_view lemma) const;
    bool is_stopword(std::string_view token) const { return stopwords.count(std::string(token)) != 0; }
    bool is_verb(std::string_view lemma) const { return verb_relations.count(std::string(lemma)) != 0; }

    // Identical lemmas or members of the same synonym set.
    bool equivalent(std::string_view a, std::string_view b) const;
    bool antonyms(std::string_view a, std::string_view b) const;

    // Stable key for a lemma's synonym class: the smallest member of its set,
    // or the lemma itself when it has no set.
    std::string class_key(std::string_view lemma) const;
    const std::set<std::string>* synonyms_of(std::string_view lemma) const;

    std::optional<int> rank(std::string_view lemma) const;
    const std::vector<RelationTemplate>& relations(std::string_view verb) const;

    // Longest surface entry measured in words; bounds multi-word lookups.
    std::size_t max_surface_words() const noexcept { return max_surface_words_; }
    const std::set<std::string>& known_lemmas() const noexcept { return known_; }

private:
    std::map<std::string, std::size_t> synonym_index_;
    std::set<std::string> known_;
    std::size_t max_surface_words_ = 1;
};

Lexicon parse_lexicon(std::string_view content, const std::string& source_name = "<lexicon>");
Lexicon load_lexicon(const std::filesystem::path& path);

// Throws ValidationError naming the offending lemma.
void validate(const Lexicon& lex);

}  // namespace teamtrace
