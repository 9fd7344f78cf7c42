#include "teamtrace/ingest.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "teamtrace/errors.hpp"
#include "teamtrace/text.hpp"

namespace teamtrace {

ElementSet elements_of(const IdeaTriple& idea, const std::set<std::string>& outputs) {
    ElementSet out;
    if (!idea.verb.empty()) out.insert({Channel::verb, idea.verb});
    if (idea.noun1 && !idea.noun1->empty()) out.insert({Channel::target, *idea.noun1});
    for (const auto& n : idea.noun2) out.insert({Channel::target, n});
    for (const auto& m : idea.modifiers) out.insert({Channel::modifier, m});
    for (const auto& o : outputs) out.insert({Channel::output, o});
    return out;
}

std::set<std::string> lemmas_of(const ElementSet& elements) {
    std::set<std::string> out;
    for (const auto& e : elements) out.insert(e.lemma);
    return out;
}

std::set<std::string> content_lemmas(const IdeaTriple& idea) { return lemmas_of(elements_of(idea)); }

namespace {

const std::set<std::string>& clause_breakers() {
    static const std::set<std::string> k = {",", ".", ";", ":", "!", "?", "and", "or", "but", "then"};
    return k;
}

const std::set<std::string>& auxiliaries() {
    static const std::set<std::string> k = {"must", "can",  "should", "will", "would", "might", "could",
                                            "may",  "is",   "are",    "was",  "were",  "be",    "been",
                                            "does", "do",   "did",    "shall"};
    return k;
}

const std::set<std::string>& determiners() {
    static const std::set<std::string> k = {"the", "a", "an", "this", "that", "these", "those",
                                            "its", "their", "our", "my", "your", "his", "her"};
    return k;
}

struct Token {
    std::string surface;
    std::string lemma;
};

// Greedy longest match of multi-word surface forms against the lemma table.
std::vector<Token> lemmatize(const std::vector<std::string>& words, const Lexicon& lex) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < words.size()) {
        std::size_t span = std::min(lex.max_surface_words(), words.size() - i);
        bool matched = false;
        for (; span >= 1; --span) {
            std::string key = words[i];
            for (std::size_t k = 1; k < span; ++k) key += " " + words[i + k];
            auto it = lex.lemmas.find(key);
            if (it != lex.lemmas.end()) {
                out.push_back({key, it->second});
                i += span;
                matched = true;
                break;
            }
        }
        if (!matched) {
            out.push_back({words[i], words[i]});
            ++i;
        }
    }
    return out;
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
    return out;
}

struct Segment {
    std::vector<std::string> words;  // raw lowercased words
};

// A verb clause under construction.
struct Draft {
    IdeaTriple triple;
    std::vector<std::string> pending_mods;  // content from verbless clauses
};

void fill_from_clause(const std::vector<Token>& toks, const Lexicon& lex, std::vector<Draft>& drafts,
                      std::vector<std::string>& orphan_content, std::vector<std::string>& orphan_text,
                      const std::string& clause_text) {
    auto is_content = [&](const Token& t) {
        return !lex.is_stopword(t.surface) && !lex.is_stopword(t.lemma) && !auxiliaries().count(t.surface);
    };
    // A verb-capable word reads as a noun after a determiner ("the sum"), or
    // after a content word once the clause has its verb ("find the maximum sum").
    std::vector<std::size_t> verbs;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (!lex.is_verb(toks[i].lemma) || lex.is_stopword(toks[i].lemma)) continue;
        if (i > 0) {
            const auto& prev = toks[i - 1];
            if (determiners().count(prev.surface)) continue;
            if (!verbs.empty() && prev.surface != "to" && is_content(prev)) continue;
        }
        verbs.push_back(i);
    }
    if (verbs.empty()) {
        for (const auto& t : toks)
            if (is_content(t)) orphan_content.push_back(t.lemma);
        orphan_text.push_back(clause_text);
        return;
    }
    for (std::size_t v = 0; v < verbs.size(); ++v) {
        std::size_t begin = v == 0 ? 0 : verbs[v - 1] + 1;
        std::size_t end = v + 1 < verbs.size() ? verbs[v + 1] : toks.size();
        Draft d;
        d.triple.verb = toks[verbs[v]].lemma;
        d.triple.clause = clause_text;
        std::vector<std::string> pre;
        bool aux_before_verb = false;
        if (v == 0) {
            for (std::size_t i = begin; i < verbs[v]; ++i) {
                if (auxiliaries().count(toks[i].surface)) {
                    if (!pre.empty()) aux_before_verb = true;
                    continue;
                }
                if (is_content(toks[i])) pre.push_back(toks[i].lemma);
            }
        }
        std::vector<std::string> post;
        for (std::size_t i = verbs[v] + 1; i < end; ++i)
            if (is_content(toks[i])) post.push_back(toks[i].lemma);

        if (!pre.empty()) {
            // "index must change" / "the array length changes": subject.
            // "bubble sort": a lone token glued to the verb qualifies it.
            if (aux_before_verb || pre.size() >= 2) {
                d.triple.noun1 = pre.back();
                pre.pop_back();
            }
            for (auto& p : pre) push_unique(d.triple.modifiers, p);
        }
        if (!post.empty()) {
            d.triple.noun2.push_back(post.back());
            post.pop_back();
            for (auto& p : post) push_unique(d.triple.modifiers, p);
        }
        drafts.push_back(std::move(d));
    }
}

}  // namespace

IdeaTriple normalize_triple(IdeaTriple t, const Lexicon& lex) {
    auto norm = [&](const std::string& s) { return lex.lemma_of(text::trim(s)); };
    t.verb = t.verb.empty() ? std::string{} : norm(t.verb);
    if (t.noun1) {
        auto n = norm(*t.noun1);
        if (n.empty()) t.noun1.reset();
        else t.noun1 = n;
    }
    std::vector<std::string> noun2, mods;
    for (const auto& n : t.noun2)
        if (auto l = norm(n); !l.empty()) push_unique(noun2, l);
    for (const auto& m : t.modifiers)
        if (auto l = norm(m); !l.empty()) push_unique(mods, l);
    t.noun2 = std::move(noun2);
    t.modifiers = std::move(mods);
    t.assertion_only = t.verb.empty();
    std::set<std::string> oov;
    for (const auto& l : content_lemmas(t))
        if (!lex.is_known(l)) oov.insert(l);
    t.out_of_lexicon.assign(oov.begin(), oov.end());
    t.clause = text::to_lower(text::trim(t.clause));
    return t;
}

std::vector<IdeaTriple> extract_ideas(const Utterance& u, const Lexicon& lex) {
    if (u.pre_annotation) {
        std::vector<IdeaTriple> out;
        int ordinal = 0;
        for (auto t : *u.pre_annotation) {
            if (t.clause.empty()) t.clause = u.text;
            t = normalize_triple(std::move(t), lex);
            t.source_utterance = u.id;
            t.ordinal = ordinal++;
            out.push_back(std::move(t));
        }
        if (!out.empty()) return out;
    }
    if (text::trim(u.text).empty()) throw ValidationError("utterance " + std::to_string(u.id) + " has empty text");

    std::vector<Segment> segments(1);
    for (auto& w : text::tokenize(u.text)) {
        if (clause_breakers().count(w)) {
            if (!segments.back().words.empty()) segments.emplace_back();
            continue;
        }
        segments.back().words.push_back(std::move(w));
    }
    if (segments.back().words.empty()) segments.pop_back();

    std::vector<Draft> drafts;
    std::vector<std::string> all_content;
    std::vector<std::string> all_text;
    // Content of verbless clauses attaches to the next verb clause, or to the
    // previous one at the end of the utterance.
    std::vector<std::string> carry;
    std::vector<std::string> carry_text;
    for (const auto& seg : segments) {
        auto toks = lemmatize(seg.words, lex);
        auto clause_text = join(seg.words);
        std::size_t before = drafts.size();
        std::vector<std::string> orphan, orphan_text;
        fill_from_clause(toks, lex, drafts, orphan, orphan_text, clause_text);
        for (auto& o : orphan) all_content.push_back(o);
        all_text.push_back(clause_text);
        if (drafts.size() > before) {
            auto& first = drafts[before];
            for (auto it = carry.rbegin(); it != carry.rend(); ++it) {
                if (std::find(first.triple.modifiers.begin(), first.triple.modifiers.end(), *it) ==
                    first.triple.modifiers.end())
                    first.triple.modifiers.insert(first.triple.modifiers.begin(), *it);
            }
            if (!carry_text.empty()) first.triple.clause = join(carry_text) + " " + first.triple.clause;
            carry.clear();
            carry_text.clear();
        } else {
            carry.insert(carry.end(), orphan.begin(), orphan.end());
            carry_text.push_back(clause_text);
        }
    }

    std::vector<IdeaTriple> out;
    if (drafts.empty()) {
        IdeaTriple t;
        for (auto& c : all_content) push_unique(t.noun2, c);
        t.clause = join(all_text);
        out.push_back(std::move(t));
    } else {
        if (!carry.empty()) {
            auto& last = drafts.back().triple;
            for (auto& c : carry) push_unique(last.modifiers, c);
            last.clause += " " + join(carry_text);
        }
        for (auto& d : drafts) out.push_back(std::move(d.triple));
    }
    int ordinal = 0;
    for (auto& t : out) {
        t = normalize_triple(std::move(t), lex);
        t.source_utterance = u.id;
        t.ordinal = ordinal++;
    }
    return out;
}

double problem_overlap(const IdeaTriple& idea, const ContextState& ctx, const Lexicon& lex) {
    auto mine = content_lemmas(idea);
    mine.erase(idea.verb);
    if (mine.empty() || ctx.problem.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& l : mine) {
        bool found = std::any_of(ctx.problem.begin(), ctx.problem.end(),
                                 [&](const Element& e) { return lex.equivalent(l, e.lemma); });
        if (found) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(mine.size());
}

namespace {

bool any_phrase(const std::string& clause, const std::vector<std::string>& phrases) {
    return std::any_of(phrases.begin(), phrases.end(),
                       [&](const auto& p) { return text::contains_phrase(clause, p); });
}

constexpr std::array<MentalImageKind, 8> kCuePriority = {
    MentalImageKind::expected_behavior,       MentalImageKind::observed_behavior,
    MentalImageKind::causality_of_differences, MentalImageKind::needed_problem_changes,
    MentalImageKind::needed_solution_changes, MentalImageKind::existing_solution,
    MentalImageKind::desired_solution,        MentalImageKind::problem,
};

}  // namespace

std::optional<MentalImageKind> cue_image(const IdeaTriple& idea, const Lexicon& lex) {
    std::set<MentalImageKind> cued;
    auto lemmas = content_lemmas(idea);
    for (const auto& [cue, kind] : lex.image_cues)
        if (lemmas.count(cue) || text::contains_phrase(idea.clause, cue)) cued.insert(kind);
    for (auto k : kCuePriority)
        if (cued.count(k)) return k;
    return std::nullopt;
}

NatureKind classify_nature(const IdeaTriple& idea, const ContextState& ctx, const Lexicon& lex,
                           const NatureConfig& cfg, const NatureCues& cues) {
    if (problem_overlap(idea, ctx, lex) >= cfg.problem_overlap) return NatureKind::problem_understanding;
    if (any_phrase(idea.clause, cues.probe)) return NatureKind::required_change;

    bool change_verb = std::any_of(cues.change_verbs.begin(), cues.change_verbs.end(),
                                   [&](const auto& v) { return lex.equivalent(idea.verb, v); });
    if (change_verb) {
        auto mine = content_lemmas(idea);
        mine.erase(idea.verb);
        bool referent = std::any_of(ctx.immediate.begin(), ctx.immediate.end(), [&](const ImmediateEntry& e) {
            auto theirs = content_lemmas(e.idea);
            return std::any_of(mine.begin(), mine.end(), [&](const auto& l) {
                return std::any_of(theirs.begin(), theirs.end(),
                                   [&](const auto& o) { return lex.equivalent(l, o); });
            });
        });
        if (referent) {
            auto hint = cue_image(idea, lex);
            return hint == MentalImageKind::needed_problem_changes ? NatureKind::required_change
                                                                    : NatureKind::solving_detailing;
        }
    }
    if (any_phrase(idea.clause, cues.evaluation)) return NatureKind::pro_con_analysis;
    return NatureKind::solving_highlevel;
}

}  // namespace teamtrace
