#include "teamtrace/icn.hpp"

#include <algorithm>
#include <functional>

#include "teamtrace/graph.hpp"

namespace teamtrace {

namespace {

std::size_t idx(Channel c) { return static_cast<std::size_t>(c); }

// Kuhn's augmenting-path maximum bipartite matching over antonym edges.
std::vector<MatchedPair> antonym_matching(const ElementSet& a, const ElementSet& b, const Lexicon& lex) {
    std::vector<Element> left(a.begin(), a.end());
    std::vector<Element> right(b.begin(), b.end());
    std::vector<std::vector<std::size_t>> adj(left.size());
    for (std::size_t i = 0; i < left.size(); ++i)
        for (std::size_t j = 0; j < right.size(); ++j)
            if (lex.antonyms(left[i].lemma, right[j].lemma)) adj[i].push_back(j);

    constexpr auto kFree = static_cast<std::size_t>(-1);
    std::vector<std::size_t> owner(right.size(), kFree);
    std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t u, std::vector<bool>& seen) {
        for (auto v : adj[u]) {
            if (seen[v]) continue;
            seen[v] = true;
            if (owner[v] == kFree || augment(owner[v], seen)) {
                owner[v] = u;
                return true;
            }
        }
        return false;
    };
    for (std::size_t u = 0; u < left.size(); ++u) {
        std::vector<bool> seen(right.size(), false);
        augment(u, seen);
    }
    std::vector<MatchedPair> out;
    for (std::size_t v = 0; v < right.size(); ++v)
        if (owner[v] != kFree) out.push_back({left[owner[v]], right[v]});
    std::sort(out.begin(), out.end(), [](const MatchedPair& x, const MatchedPair& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return out;
}

}  // namespace

int MatchResult::matched_in(Channel c) const {
    return static_cast<int>(
        std::count_if(matched_pairs.begin(), matched_pairs.end(), [&](const MatchedPair& p) { return p.a.channel == c; }));
}

double channel_weight(Channel c) {
    switch (c) {
        case Channel::verb:
        case Channel::target:
            return 0.4;
        case Channel::output:
        case Channel::modifier:
            return 0.2;
    }
    return 0.0;
}

MatchResult match(const ElementSet& a, const ElementSet& b, const Lexicon& lex) {
    MatchResult r;
    for (auto c : kAllChannels) {
        std::vector<Element> left, right;
        for (const auto& e : a)
            if (e.channel == c) left.push_back(e);
        for (const auto& e : b)
            if (e.channel == c) right.push_back(e);
        r.size_a[idx(c)] = static_cast<int>(left.size());
        r.size_b[idx(c)] = static_cast<int>(right.size());

        std::vector<bool> used_l(left.size(), false), used_r(right.size(), false);
        // identical lemmas first
        for (std::size_t i = 0; i < left.size(); ++i) {
            for (std::size_t j = 0; j < right.size(); ++j) {
                if (!used_r[j] && left[i].lemma == right[j].lemma) {
                    used_l[i] = used_r[j] = true;
                    r.matched_pairs.push_back({left[i], right[j]});
                    break;
                }
            }
        }
        // then synonyms, lexicographic; synonym sets partition the lemmas, so
        // greedy pairing reaches the maximum cardinality
        for (std::size_t i = 0; i < left.size(); ++i) {
            if (used_l[i]) continue;
            for (std::size_t j = 0; j < right.size(); ++j) {
                if (!used_r[j] && lex.equivalent(left[i].lemma, right[j].lemma)) {
                    used_l[i] = used_r[j] = true;
                    r.matched_pairs.push_back({left[i], right[j]});
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < left.size(); ++i)
            if (!used_l[i]) r.unmatched_a.insert(left[i]);
        for (std::size_t j = 0; j < right.size(); ++j)
            if (!used_r[j]) r.unmatched_b.insert(right[j]);
    }
    r.opposites = antonym_matching(r.unmatched_a, r.unmatched_b, lex);
    return r;
}

double similarity(const MatchResult& m) {
    double num = 0.0;
    double den = 0.0;
    for (auto c : kAllChannels) {
        auto w = channel_weight(c);
        num += w * m.matched_in(c);
        den += w * std::max(m.size_a[idx(c)], m.size_b[idx(c)]);
    }
    if (den <= 0.0) return 0.0;
    double s = num / den - 0.2 * static_cast<double>(m.opposites.size());
    return std::clamp(s, 0.0, 1.0);
}

ElementSet Icn::all_elements() const {
    ElementSet out = te;
    out.insert(ev.begin(), ev.end());
    return out;
}

namespace {

using ClassKey = std::pair<Channel, std::string>;

void recompute(Icn& icn, const Lexicon& lex) {
    icn.slots = {};
    std::map<ClassKey, int> counts;
    std::map<ClassKey, std::string> representative;
    for (const auto& m : icn.members) {
        std::set<ClassKey> seen;
        for (const auto& e : m.elements) {
            ClassKey key{e.channel, lex.class_key(e.lemma)};
            seen.insert(key);
            auto [it, fresh] = representative.emplace(key, e.lemma);
            if (!fresh && e.lemma < it->second) it->second = e.lemma;
            switch (e.channel) {
                case Channel::verb: ++icn.slots.verbs[e.lemma]; break;
                case Channel::target:
                case Channel::modifier: ++icn.slots.targets[e.lemma]; break;
                case Channel::output: ++icn.slots.expected_outputs[e.lemma]; break;
            }
        }
        for (const auto& k : seen) ++counts[k];
    }
    auto n = static_cast<int>(icn.members.size());
    int majority = (n + 1) / 2;
    std::set<ClassKey> typical;
    icn.te.clear();
    icn.ev.clear();
    for (const auto& [key, count] : counts) {
        if (count >= majority) {
            typical.insert(key);
            icn.te.insert({key.first, representative[key]});
        }
    }
    for (const auto& m : icn.members)
        for (const auto& e : m.elements)
            if (!typical.count({e.channel, lex.class_key(e.lemma)})) icn.ev.insert(e);
    icn.image = tag_image(icn);
}

}  // namespace

Icn make_icn(IcnId id, const IdeaFeatures& idea, int index, const Lexicon& lex) {
    Icn icn;
    icn.id = id;
    icn.created_at = idea.triple.source_utterance;
    return update_te_ev(std::move(icn), idea, index, lex);
}

Icn update_te_ev(Icn icn, const IdeaFeatures& idea, int index, const Lexicon& lex) {
    icn.members.push_back(
        IcnMember{idea.triple.source_utterance, idea.triple.ordinal, index, idea.elements, idea.hint});
    icn.goals.insert(idea.goals.begin(), idea.goals.end());
    recompute(icn, lex);
    return icn;
}

double icn_similarity(const ElementSet& idea, const Icn& icn, const Lexicon& lex) {
    double best = similarity(match(idea, icn.te, lex));
    for (const auto& m : icn.members) best = std::max(best, similarity(match(idea, m.elements, lex)));
    return best;
}

std::string_view to_string(Decision d) {
    switch (d) {
        case Decision::join: return "join";
        case Decision::new_detailing: return "new_detailing";
        case Decision::new_exploration: return "new_exploration";
        case Decision::new_root: return "new_root";
    }
    return "new_root";
}

std::optional<Decision> decision_from_string(std::string_view s) {
    for (auto d : {Decision::join, Decision::new_detailing, Decision::new_exploration, Decision::new_root})
        if (to_string(d) == s) return d;
    return std::nullopt;
}

std::vector<IcnId> candidate_icns(const ProcessGraph& graph, const ContextState& ctx, const Thresholds& cfg) {
    std::set<IcnId> ids;
    for (const auto& e : ctx.immediate)
        if (graph.find(e.icn)) ids.insert(e.icn);
    int taken = 0;
    for (const auto& m : ctx.medium) {
        if (taken >= cfg.candidates) break;
        if (!graph.find(m.icn)) continue;
        ids.insert(m.icn);
        ++taken;
    }
    return {ids.begin(), ids.end()};
}

Assignment assign(const IdeaFeatures& idea, const ProcessGraph& graph, const ContextState& ctx,
                  const Thresholds& cfg, const Lexicon& lex) {
    Assignment out;
    auto cands = candidate_icns(graph, ctx, cfg);
    if (cands.empty()) return out;

    std::vector<std::pair<IcnId, double>> scored;
    for (auto id : cands) scored.emplace_back(id, icn_similarity(idea.elements, graph.at(id), lex));
    std::stable_sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });
    out.best_candidate = scored.front().first;
    out.score = scored.front().second;
    if (out.score >= cfg.theta_join) {
        out.decision = Decision::join;
        out.target = out.best_candidate;
        return out;
    }

    if (!idea.elements.empty()) {
        for (const auto& [id, sim] : scored) {
            const auto& icn = graph.at(id);
            auto full = icn.all_elements();
            auto m = match(idea.elements, full, lex);
            if (m.matched_pairs.empty()) continue;
            ElementSet detailed;
            for (const auto& p : m.matched_pairs) detailed.insert(p.b);
            if (detailed.size() >= full.size()) continue;
            double coverage = static_cast<double>(m.matched_pairs.size()) / static_cast<double>(idea.elements.size());
            if (coverage < cfg.theta_detail) continue;
            int parent_rank = 0;
            for (const auto& d : detailed) parent_rank = std::max(parent_rank, lex.rank(d.lemma).value_or(0));
            bool more_concrete = std::any_of(m.unmatched_a.begin(), m.unmatched_a.end(), [&](const Element& e) {
                auto r = lex.rank(e.lemma);
                return r && *r > parent_rank;
            });
            if (!more_concrete) continue;
            out.decision = Decision::new_detailing;
            out.target = id;
            out.detailed_elements = std::move(detailed);
            return out;
        }
    }

    if (!idea.goals.empty()) {
        for (const auto& [id, sim] : scored) {
            const auto& icn = graph.at(id);
            bool shares_goal = std::any_of(idea.goals.begin(), idea.goals.end(),
                                           [&](const auto& g) { return icn.goals.count(g) != 0; });
            if (!shares_goal) continue;
            auto m = match(idea.elements, icn.all_elements(), lex);
            if (m.matched_in(Channel::verb) != 0) continue;
            out.decision = Decision::new_exploration;
            out.target = graph.context_of(id);
            return out;
        }
    }

    out.decision = Decision::new_root;
    return out;
}

}  // namespace teamtrace
