#include "teamtrace/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "teamtrace/errors.hpp"
#include "teamtrace/text.hpp"

namespace teamtrace {

std::set<std::string> RelationTemplate::lemmas() const {
    std::set<std::string> out(object_class.begin(), object_class.end());
    out.insert(verb);
    if (output) out.insert(*output);
    if (goal) out.insert(*goal);
    return out;
}

void Lexicon::reindex() {
    synonym_index_.clear();
    for (std::size_t i = 0; i < synonym_sets.size(); ++i) {
        for (const auto& l : synonym_sets[i]) synonym_index_.emplace(l, i);
    }
    known_.clear();
    max_surface_words_ = 1;
    for (const auto& [surface, lemma] : lemmas) {
        known_.insert(lemma);
        auto words = static_cast<std::size_t>(std::count(surface.begin(), surface.end(), ' ')) + 1;
        max_surface_words_ = std::max(max_surface_words_, words);
    }
    for (const auto& set : synonym_sets) known_.insert(set.begin(), set.end());
    for (const auto& [a, b] : antonym_pairs) {
        known_.insert(a);
        known_.insert(b);
    }
    for (const auto& [l, r] : abstraction_rank) known_.insert(l);
    for (const auto& [verb, templates] : verb_relations) {
        known_.insert(verb);
        for (const auto& t : templates) {
            auto ls = t.lemmas();
            known_.insert(ls.begin(), ls.end());
        }
    }
}

std::string Lexicon::lemma_of(std::string_view surface) const {
    auto key = text::to_lower(surface);
    auto it = lemmas.find(key);
    return it == lemmas.end() ? key : it->second;
}

bool Lexicon::is_known(std::string_view lemma) const { return known_.count(std::string(lemma)) != 0; }

bool Lexicon::equivalent(std::string_view a, std::string_view b) const {
    if (a == b) return true;
    auto ia = synonym_index_.find(std::string(a));
    if (ia == synonym_index_.end()) return false;
    auto ib = synonym_index_.find(std::string(b));
    return ib != synonym_index_.end() && ia->second == ib->second;
}

bool Lexicon::antonyms(std::string_view a, std::string_view b) const {
    return antonym_pairs.count({std::string(a), std::string(b)}) != 0;
}

std::string Lexicon::class_key(std::string_view lemma) const {
    auto it = synonym_index_.find(std::string(lemma));
    if (it == synonym_index_.end()) return std::string(lemma);
    return *synonym_sets[it->second].begin();
}

const std::set<std::string>* Lexicon::synonyms_of(std::string_view lemma) const {
    auto it = synonym_index_.find(std::string(lemma));
    return it == synonym_index_.end() ? nullptr : &synonym_sets[it->second];
}

std::optional<int> Lexicon::rank(std::string_view lemma) const {
    auto it = abstraction_rank.find(std::string(lemma));
    if (it == abstraction_rank.end()) return std::nullopt;
    return it->second;
}

const std::vector<RelationTemplate>& Lexicon::relations(std::string_view verb) const {
    static const std::vector<RelationTemplate> kEmpty;
    auto it = verb_relations.find(std::string(verb));
    return it == verb_relations.end() ? kEmpty : it->second;
}

namespace {

enum class Section { none, lemmas, synonyms, antonyms, stopwords, abstraction, verb_relations, image_cues };

Section section_from(std::string_view name) {
    if (name == "lemmas") return Section::lemmas;
    if (name == "synonyms") return Section::synonyms;
    if (name == "antonyms") return Section::antonyms;
    if (name == "stopwords") return Section::stopwords;
    if (name == "abstraction") return Section::abstraction;
    if (name == "verb_relations") return Section::verb_relations;
    if (name == "image_cues") return Section::image_cues;
    return Section::none;
}

std::pair<std::string, std::string> split_kv(const std::string& line, const std::string& src, std::size_t n) {
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(src, n, "expected 'key = value'");
    auto key = text::to_lower(text::trim(std::string_view(line).substr(0, eq)));
    auto value = text::trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError(src, n, "empty key");
    return {key, value};
}

// "object: a|b ; output: x ; goal: y" (every part optional)
RelationTemplate parse_template(const std::string& verb, const std::string& spec, const std::string& src,
                                std::size_t n) {
    RelationTemplate t;
    t.verb = verb;
    for (const auto& part : text::split_list(spec, ';')) {
        auto colon = part.find(':');
        if (colon == std::string::npos) throw ParseError(src, n, "relation part without ':' in '" + part + "'");
        auto field = text::to_lower(text::trim(std::string_view(part).substr(0, colon)));
        auto value = text::to_lower(text::trim(std::string_view(part).substr(colon + 1)));
        if (field == "object") {
            for (auto& o : text::split_list(value, '|')) t.object_class.insert(o);
        } else if (field == "output") {
            if (!value.empty()) t.output = value;
        } else if (field == "goal") {
            if (!value.empty()) t.goal = value;
        } else {
            throw ParseError(src, n, "unknown relation field '" + field + "'");
        }
    }
    return t;
}

}  // namespace

Lexicon parse_lexicon(std::string_view content, const std::string& source_name) {
    Lexicon lex;
    Section section = Section::none;
    std::istringstream in{std::string(content)};
    std::string raw;
    std::size_t n = 0;
    while (std::getline(in, raw)) {
        ++n;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        auto line = text::trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(source_name, n, "unterminated section header");
            auto name = text::trim(std::string_view(line).substr(1, line.size() - 2));
            section = section_from(name);
            if (section == Section::none) throw ParseError(source_name, n, "unknown section '" + name + "'");
            continue;
        }
        switch (section) {
            case Section::none:
                throw ParseError(source_name, n, "entry outside of any section");
            case Section::lemmas: {
                auto [surface, lemma] = split_kv(line, source_name, n);
                lemma = text::to_lower(lemma);
                if (lemma.empty()) throw ParseError(source_name, n, "empty lemma for '" + surface + "'");
                // collapse inner whitespace of multi-word surfaces
                std::string norm;
                for (auto& w : text::split_list(surface, ' ')) norm += (norm.empty() ? "" : " ") + w;
                lex.lemmas[norm] = lemma;
                break;
            }
            case Section::synonyms: {
                std::set<std::string> set;
                for (auto& w : text::split_list(text::to_lower(line), ',')) set.insert(w);
                if (set.size() < 2) throw ParseError(source_name, n, "synonym set needs at least two lemmas");
                lex.synonym_sets.push_back(std::move(set));
                break;
            }
            case Section::antonyms: {
                auto words = text::split_list(text::to_lower(line), ',');
                if (words.size() != 2) throw ParseError(source_name, n, "antonym line needs exactly two lemmas");
                lex.antonym_pairs.emplace(words[0], words[1]);
                lex.antonym_pairs.emplace(words[1], words[0]);
                break;
            }
            case Section::stopwords:
                for (auto& w : text::split_list(text::to_lower(line), ',')) lex.stopwords.insert(w);
                break;
            case Section::abstraction: {
                auto [lemma, value] = split_kv(line, source_name, n);
                int rank = 0;
                auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), rank);
                if (ec != std::errc{} || ptr != value.data() + value.size())
                    throw ParseError(source_name, n, "abstraction rank must be an integer: '" + value + "'");
                lex.abstraction_rank[lemma] = rank;
                break;
            }
            case Section::verb_relations: {
                auto [verb, spec] = split_kv(line, source_name, n);
                auto& templates = lex.verb_relations[verb];
                if (!text::trim(spec).empty()) templates.push_back(parse_template(verb, spec, source_name, n));
                break;
            }
            case Section::image_cues: {
                auto [cue, kind] = split_kv(line, source_name, n);
                auto k = image_kind_from_string(text::to_lower(kind));
                if (!k) throw ParseError(source_name, n, "unknown mental image kind '" + kind + "'");
                lex.image_cues[cue] = *k;
                break;
            }
        }
    }
    lex.reindex();
    validate(lex);
    return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open lexicon file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_lexicon(buf.str(), path.string());
}

void validate(const Lexicon& lex) {
    std::map<std::string, std::size_t> owner;
    for (std::size_t i = 0; i < lex.synonym_sets.size(); ++i) {
        for (const auto& l : lex.synonym_sets[i]) {
            auto [it, fresh] = owner.emplace(l, i);
            if (!fresh && it->second != i)
                throw ValidationError("lemma '" + l + "' belongs to more than one synonym set");
        }
    }
    for (const auto& [a, b] : lex.antonym_pairs) {
        if (a == b) throw ValidationError("lemma '" + a + "' is listed as its own antonym");
        if (!lex.antonym_pairs.count({b, a})) throw ValidationError("antonym pair for '" + a + "' is not symmetric");
        if (lex.equivalent(a, b)) throw ValidationError("lemma '" + a + "' is both synonym and antonym of '" + b + "'");
    }
    for (const auto& [lemma, rank] : lex.abstraction_rank) {
        if (rank < 0) throw ValidationError("lemma '" + lemma + "' has a negative abstraction rank");
    }
    for (const auto& [verb, templates] : lex.verb_relations) {
        if (!lex.abstraction_rank.count(verb))
            throw ValidationError("verb '" + verb + "' has relations but no abstraction rank");
        for (const auto& t : templates) {
            for (const auto& l : t.lemmas()) {
                if (!lex.abstraction_rank.count(l))
                    throw ValidationError("lemma '" + l + "' appears in verb_relations but has no abstraction rank");
            }
        }
    }
}

}  // namespace teamtrace
