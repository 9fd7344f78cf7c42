#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

namespace tt_test {

std::filesystem::path data_dir() { return TEAMTRACE_DATA_DIR; }

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const Golden& golden() {
    static const Golden g = [] {
        Golden out;
        out.lex = std::make_shared<const Lexicon>(load_lexicon(data_dir() / "case_study.lex"));
        out.cfg = load_config(data_dir() / "default.cfg");
        std::ifstream in(data_dir() / "case_study.transcript.jsonl");
        out.transcript = read_transcript(in, "case_study.transcript.jsonl");
        return out;
    }();
    return g;
}

std::unique_ptr<Session> run(const Transcript& t, std::shared_ptr<const Lexicon> lex, const SessionConfig& cfg) {
    auto s = open_session(cfg, std::move(lex), t.problem_statement);
    for (const auto& u : t.utterances) s->process(u);
    return s;
}

IcnId icn_of(const Snapshot& s, UtteranceId u, int ordinal) {
    for (const auto& r : s.history)
        if (r.utterance == u && r.ordinal == ordinal) return r.icn;
    return 0;
}

// ---------------------------------------------------------------- corpora

std::shared_ptr<const Lexicon> random_lexicon(std::uint32_t seed) {
    std::mt19937 rng(seed);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint32_t>(n)); };
    auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };

    std::vector<std::string> verbs, nouns, mods, goals = {"g0", "g1"};
    for (int i = 0; i < 6; ++i) verbs.push_back("v" + std::to_string(i));
    for (int i = 0; i < 14; ++i) nouns.push_back("n" + std::to_string(i));
    for (int i = 0; i < 8; ++i) mods.push_back("m" + std::to_string(i));

    Lexicon lex;
    std::set<std::string> grouped;
    auto group = [&](const std::vector<std::string>& pool, int lo, int hi, int size) {
        std::set<std::string> set;
        for (int tries = 0; tries < 20 && static_cast<int>(set.size()) < size; ++tries) {
            auto& w = pool[lo + pick(hi - lo)];
            if (!grouped.count(w)) set.insert(w);
        }
        if (set.size() >= 2) {
            grouped.insert(set.begin(), set.end());
            lex.synonym_sets.push_back(set);
        }
    };
    group(verbs, 0, 6, 2 + pick(2));
    group(nouns, 0, 10, 2);
    group(nouns, 0, 10, 2 + pick(2));
    group(mods, 0, 8, 2);

    for (int k = 0; k < 3; ++k) {
        std::string a, b;
        if (coin(0.5)) {
            a = nouns[pick(10)];
            b = nouns[pick(10)];
        } else {
            a = mods[pick(8)];
            b = coin(0.5) ? mods[pick(8)] : nouns[pick(10)];
        }
        if (a == b) continue;
        lex.reindex();
        if (lex.equivalent(a, b)) continue;
        lex.antonym_pairs.emplace(a, b);
        lex.antonym_pairs.emplace(b, a);
    }
    for (const auto* pool : {&verbs, &nouns, &mods, &goals})
        for (const auto& w : *pool) lex.abstraction_rank[w] = pick(4);
    for (const auto& v : verbs) {
        int n = 1 + pick(2);
        for (int k = 0; k < n; ++k) {
            RelationTemplate t;
            t.verb = v;
            int objs = 2 + pick(3);
            for (int o = 0; o < objs; ++o) t.object_class.insert(nouns[pick(14)]);
            if (coin(0.5)) t.output = nouns[10 + pick(4)];
            if (coin(0.7)) t.goal = goals[pick(2)];
            lex.verb_relations[v].push_back(t);
        }
    }
    lex.reindex();
    validate(lex);
    return std::make_shared<const Lexicon>(std::move(lex));
}

Transcript random_transcript(std::uint32_t seed, const Lexicon& lex, int max_ideas) {
    std::mt19937 rng(seed ^ 0x9e3779b9u);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint32_t>(n)); };
    auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
    (void)lex;

    Transcript t;
    int ideas = 1 + pick(max_ideas);
    UtteranceId id = 0;
    std::int64_t clock = 0;
    while (ideas > 0) {
        Utterance u;
        id += 1 + pick(2);
        clock += pick(5000);
        u.id = id;
        u.session = "random";
        u.speaker = "p" + std::to_string(pick(3));
        u.t_ms = clock;
        int here = std::min(ideas, coin(0.2) ? 2 : 1);
        std::vector<IdeaTriple> triples;
        for (int k = 0; k < here; ++k) {
            IdeaTriple tr;
            if (coin(0.9)) tr.verb = "v" + std::to_string(pick(6));
            if (coin(0.2)) tr.noun1 = "n" + std::to_string(pick(10));
            for (int n = pick(3); n > 0; --n) tr.noun2.push_back("n" + std::to_string(pick(12)));
            for (int n = pick(3); n > 0; --n) tr.modifiers.push_back("m" + std::to_string(pick(8)));
            if (tr.verb.empty() && !tr.noun1 && tr.noun2.empty() && tr.modifiers.empty())
                tr.noun2.push_back("n" + std::to_string(pick(10)));
            triples.push_back(tr);
        }
        u.text = "random utterance " + std::to_string(id);
        u.pre_annotation = triples;
        t.utterances.push_back(u);
        ideas -= here;
    }
    return t;
}

// ---------------------------------------------------------------- oracle

namespace {

std::vector<Element> on_channel(const ElementSet& s, Channel c) {
    std::vector<Element> out;
    for (const auto& e : s)
        if (e.channel == c) out.push_back(e);
    return out;
}

// Largest number of disjoint pairs (i, j) with ok(i, j), by exhaustive search.
int max_pairs(std::size_t n, std::size_t m, const std::function<bool(std::size_t, std::size_t)>& ok) {
    std::vector<bool> used(m, false);
    std::function<int(std::size_t)> go = [&](std::size_t i) -> int {
        if (i == n) return 0;
        int best = go(i + 1);
        for (std::size_t j = 0; j < m; ++j) {
            if (used[j] || !ok(i, j)) continue;
            used[j] = true;
            best = std::max(best, 1 + go(i + 1));
            used[j] = false;
        }
        return best;
    };
    return go(0);
}

struct OracleMatch {
    std::map<Channel, int> matched;
    std::map<Channel, int> size_a, size_b;
    std::vector<std::pair<Element, Element>> pairs;  // canonical pairing
    ElementSet unmatched_a, unmatched_b;
    int opposites = 0;
};

OracleMatch oracle_match(const ElementSet& a, const ElementSet& b, const Lexicon& lex) {
    OracleMatch m;
    for (auto c : kAllChannels) {
        auto left = on_channel(a, c);
        auto right = on_channel(b, c);
        m.size_a[c] = static_cast<int>(left.size());
        m.size_b[c] = static_cast<int>(right.size());
        int best = max_pairs(left.size(), right.size(),
                             [&](std::size_t i, std::size_t j) { return lex.equivalent(left[i].lemma, right[j].lemma); });
        m.matched[c] = best;

        // Canonical pairing: identical lemmas, then equivalents in
        // lexicographic order; it must reach the exhaustive maximum.
        std::set<std::size_t> used_l, used_r;
        for (std::size_t i = 0; i < left.size(); ++i)
            for (std::size_t j = 0; j < right.size(); ++j)
                if (!used_r.count(j) && left[i].lemma == right[j].lemma) {
                    used_l.insert(i);
                    used_r.insert(j);
                    m.pairs.push_back({left[i], right[j]});
                    break;
                }
        for (std::size_t i = 0; i < left.size(); ++i) {
            if (used_l.count(i)) continue;
            for (std::size_t j = 0; j < right.size(); ++j)
                if (!used_r.count(j) && lex.equivalent(left[i].lemma, right[j].lemma)) {
                    used_l.insert(i);
                    used_r.insert(j);
                    m.pairs.push_back({left[i], right[j]});
                    break;
                }
        }
        if (static_cast<int>(used_l.size()) != best)
            throw std::logic_error("canonical pairing misses the maximum matching");
        for (std::size_t i = 0; i < left.size(); ++i)
            if (!used_l.count(i)) m.unmatched_a.insert(left[i]);
        for (std::size_t j = 0; j < right.size(); ++j)
            if (!used_r.count(j)) m.unmatched_b.insert(right[j]);
    }
    std::vector<Element> ua(m.unmatched_a.begin(), m.unmatched_a.end());
    std::vector<Element> ub(m.unmatched_b.begin(), m.unmatched_b.end());
    m.opposites = max_pairs(ua.size(), ub.size(),
                            [&](std::size_t i, std::size_t j) { return lex.antonyms(ua[i].lemma, ub[j].lemma); });
    return m;
}

double weight_of(Channel c) { return c == Channel::verb || c == Channel::target ? 0.4 : 0.2; }

double score(const OracleMatch& m) {
    double num = 0, den = 0;
    for (auto c : kAllChannels) {
        num += weight_of(c) * m.matched.at(c);
        den += weight_of(c) * std::max(m.size_a.at(c), m.size_b.at(c));
    }
    if (den == 0) return 0;
    return std::clamp(num / den - 0.2 * m.opposites, 0.0, 1.0);
}

std::set<std::string> lemmas_in(const ElementSet& s) {
    std::set<std::string> out;
    for (const auto& e : s) out.insert(e.lemma);
    return out;
}

std::set<std::string> triple_lemmas(const IdeaTriple& t) {
    std::set<std::string> out(t.noun2.begin(), t.noun2.end());
    out.insert(t.modifiers.begin(), t.modifiers.end());
    if (!t.verb.empty()) out.insert(t.verb);
    if (t.noun1) out.insert(*t.noun1);
    return out;
}

}  // namespace

double Oracle::similarity(const ElementSet& a, const ElementSet& b) const { return score(oracle_match(a, b, lex_)); }

void Oracle::recount(Cluster& c) const {
    std::map<std::pair<Channel, std::string>, std::set<int>> holders;
    std::map<std::pair<Channel, std::string>, std::string> smallest;
    for (int m : c.members) {
        for (const auto& e : ideas_[m].elements) {
            std::pair<Channel, std::string> key{e.channel, lex_.class_key(e.lemma)};
            holders[key].insert(m);
            auto it = smallest.find(key);
            if (it == smallest.end() || e.lemma < it->second) smallest[key] = e.lemma;
        }
    }
    auto n = c.members.size();
    c.te.clear();
    c.ev.clear();
    for (const auto& [key, who] : holders)
        if (2 * who.size() >= n) c.te.insert({key.first, smallest[key]});
    for (int m : c.members)
        for (const auto& e : ideas_[m].elements) {
            std::pair<Channel, std::string> key{e.channel, lex_.class_key(e.lemma)};
            if (2 * holders[key].size() < n) c.ev.insert(e);
        }
    c.goals.clear();
    for (int m : c.members) c.goals.insert(ideas_[m].goals.begin(), ideas_[m].goals.end());
}

IcnId Oracle::context_of(IcnId id) const {
    auto cur = id;
    while (clusters_.at(cur).detail_parent) cur = *clusters_.at(cur).detail_parent;
    if (clusters_.at(cur).explore_parent) return *clusters_.at(cur).explore_parent;
    return cur;
}

OracleStep Oracle::step(const IdeaTriple& t) {
    const auto& cc = cfg_.context;

    // activation closure
    std::string trigger = t.noun1 && !t.noun1->empty() ? *t.noun1
                          : !t.noun2.empty()          ? t.noun2.front()
                          : !t.modifiers.empty()      ? t.modifiers.front()
                                                      : t.verb;
    std::map<std::string, double> act;
    act[trigger] = cc.weight_trigger;
    if (lex_.is_known(trigger)) {
        std::set<std::string> closure{trigger};
        for (const auto& set : lex_.synonym_sets)
            if (set.count(trigger)) closure.insert(set.begin(), set.end());
        for (const auto& s : closure)
            if (s != trigger) act[s] = std::max(act[s], cc.weight_synonym);
        for (const auto& [verb, ts] : lex_.verb_relations)
            for (const auto& tpl : ts) {
                std::set<std::string> ls(tpl.object_class.begin(), tpl.object_class.end());
                ls.insert(tpl.verb);
                if (tpl.output) ls.insert(*tpl.output);
                if (tpl.goal) ls.insert(*tpl.goal);
                bool touches = false;
                for (const auto& c : closure) touches = touches || ls.count(c);
                if (!touches) continue;
                for (const auto& l : ls)
                    if (!closure.count(l)) act[l] = std::max(act[l], cc.weight_neighbor);
            }
    }

    // immediate window: boost or decay, then evict
    std::vector<Entry> kept;
    for (auto e : window_) {
        auto ls = triple_lemmas(ideas_[e.idea].triple);
        auto te = lemmas_in(clusters_.at(e.icn).te);
        ls.insert(te.begin(), te.end());
        bool hit = std::any_of(ls.begin(), ls.end(), [&](const auto& l) { return act.count(l) != 0; });
        e.weight = hit ? 1.0 : e.weight * cc.decay;
        if (e.weight >= cc.evict_threshold) kept.push_back(e);
    }
    window_ = kept;
    for (auto& r : medium_) {
        r.score = 0;
        for (const auto& l : lemmas_in(clusters_.at(r.icn).te))
            if (act.count(l)) r.score += act[l];
    }
    std::stable_sort(medium_.begin(), medium_.end(), [](const Ranked& a, const Ranked& b) {
        return a.score != b.score ? a.score > b.score : a.icn < b.icn;
    });

    // relations of the verb, filtered by the activated objects
    std::vector<RelationTemplate> rel;
    auto vit = lex_.verb_relations.find(t.verb);
    if (vit != lex_.verb_relations.end()) {
        for (const auto& tpl : vit->second)
            for (const auto& o : tpl.object_class)
                if (act.count(o)) {
                    rel.push_back(tpl);
                    break;
                }
        if (rel.empty()) rel = vit->second;
    }
    Idea idea;
    idea.triple = t;
    std::set<std::string> outputs;
    for (const auto& r : rel) {
        if (r.output) outputs.insert(*r.output);
        if (r.goal) idea.goals.insert(*r.goal);
    }
    if (!t.verb.empty()) idea.elements.insert({Channel::verb, t.verb});
    if (t.noun1 && !t.noun1->empty()) idea.elements.insert({Channel::target, *t.noun1});
    for (const auto& n : t.noun2) idea.elements.insert({Channel::target, n});
    for (const auto& m : t.modifiers) idea.elements.insert({Channel::modifier, m});
    for (const auto& o : outputs) idea.elements.insert({Channel::output, o});

    // candidates
    std::set<IcnId> cand;
    for (const auto& e : window_) cand.insert(e.icn);
    for (std::size_t k = 0; k < medium_.size() && static_cast<int>(k) < cfg_.icn.candidates; ++k)
        cand.insert(medium_[k].icn);

    std::vector<std::pair<IcnId, double>> ranked;
    for (auto id : cand) {
        const auto& c = clusters_.at(id);
        double best = similarity(idea.elements, c.te);
        for (int m : c.members) best = std::max(best, similarity(idea.elements, ideas_[m].elements));
        ranked.emplace_back(id, best);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        return x.second != y.second ? x.second > y.second : x.first < y.first;
    });

    OracleStep out;
    bool decided = false;
    if (!ranked.empty()) {
        out.score = ranked.front().second;
        if (out.score >= cfg_.icn.theta_join) {
            out.decision = Decision::join;
            out.target = ranked.front().first;
            decided = true;
        }
    }
    for (std::size_t k = 0; !decided && !idea.elements.empty() && k < ranked.size(); ++k) {
        const auto& c = clusters_.at(ranked[k].first);
        ElementSet whole = c.te;
        whole.insert(c.ev.begin(), c.ev.end());
        auto m = oracle_match(idea.elements, whole, lex_);
        if (m.pairs.empty()) continue;
        ElementSet detailed;
        ElementSet used_a;
        for (const auto& [x, y] : m.pairs) {
            detailed.insert(y);
            used_a.insert(x);
        }
        if (detailed.size() >= whole.size()) continue;
        if (static_cast<double>(m.pairs.size()) / static_cast<double>(idea.elements.size()) < cfg_.icn.theta_detail)
            continue;
        int top = 0;
        for (const auto& d : detailed) top = std::max(top, lex_.rank(d.lemma).value_or(0));
        bool finer = false;
        for (const auto& e : idea.elements)
            if (!used_a.count(e) && lex_.rank(e.lemma) && *lex_.rank(e.lemma) > top) finer = true;
        if (!finer) continue;
        out.decision = Decision::new_detailing;
        out.target = c.id;
        out.detailed = detailed;
        decided = true;
    }
    for (std::size_t k = 0; !decided && !idea.goals.empty() && k < ranked.size(); ++k) {
        const auto& c = clusters_.at(ranked[k].first);
        bool shared = std::any_of(idea.goals.begin(), idea.goals.end(), [&](const auto& g) { return c.goals.count(g); });
        if (!shared) continue;
        ElementSet whole = c.te;
        whole.insert(c.ev.begin(), c.ev.end());
        if (oracle_match(idea.elements, whole, lex_).matched.at(Channel::verb) > 0) continue;
        out.decision = Decision::new_exploration;
        out.target = context_of(c.id);
        decided = true;
    }

    int index = static_cast<int>(ideas_.size());
    ideas_.push_back(idea);
    if (out.decision == Decision::join) {
        out.icn = out.target;
    } else {
        out.icn = static_cast<IcnId>(clusters_.size()) + 1;
        Cluster c;
        c.id = out.icn;
        if (out.decision == Decision::new_detailing) c.detail_parent = out.target;
        if (out.decision == Decision::new_exploration) c.explore_parent = out.target;
        clusters_[c.id] = c;
        medium_.push_back({c.id, 0.0});
    }
    clusters_[out.icn].members.push_back(index);
    recount(clusters_[out.icn]);

    window_.push_back({index, out.icn, 1.0});
    while (static_cast<int>(window_.size()) > cc.window) window_.erase(window_.begin());
    std::stable_sort(medium_.begin(), medium_.end(), [](const Ranked& a, const Ranked& b) {
        return a.score != b.score ? a.score > b.score : a.icn < b.icn;
    });
    return out;
}

// ---------------------------------------------------------------- invariants

std::vector<std::string> check_invariants(const Snapshot& s, const std::vector<SessionEvent>& log, const Lexicon& lex,
                                          const SessionConfig& cfg) {
    std::vector<std::string> bad;
    const auto& g = s.graph;

    // partition: each idea in exactly one ICN
    std::map<std::pair<UtteranceId, int>, int> seen;
    for (const auto& [id, icn] : g.icns())
        for (const auto& m : icn.members) ++seen[{m.utterance, m.ordinal}];
    for (const auto& [key, n] : seen)
        if (n != 1) bad.push_back("idea u" + std::to_string(key.first) + " in " + std::to_string(n) + " ICNs");
    if (seen.size() != s.history.size()) bad.push_back("ICN members do not cover the idea history");
    for (const auto& r : s.history) {
        const auto* icn = g.find(r.icn);
        if (!icn) {
            bad.push_back("history names missing ICN " + std::to_string(r.icn));
            continue;
        }
        bool found = std::any_of(icn->members.begin(), icn->members.end(),
                                 [&](const IcnMember& m) { return m.utterance == r.utterance && m.ordinal == r.ordinal; });
        if (!found) bad.push_back("ICN " + std::to_string(r.icn) + " lacks its recorded idea");
    }

    // TE/EV: disjoint, TE classes held by a majority, EV is every other member element
    for (const auto& [id, icn] : g.icns()) {
        auto tag = "ICN " + std::to_string(id) + ": ";
        for (const auto& e : icn.te)
            if (icn.ev.count(e)) bad.push_back(tag + "element in both TE and EV");
        std::map<std::pair<Channel, std::string>, int> holders;
        for (const auto& m : icn.members) {
            std::set<std::pair<Channel, std::string>> mine;
            for (const auto& e : m.elements) mine.insert({e.channel, lex.class_key(e.lemma)});
            for (const auto& k : mine) ++holders[k];
        }
        auto n = static_cast<int>(icn.members.size());
        std::set<std::pair<Channel, std::string>> te_classes;
        for (const auto& e : icn.te) te_classes.insert({e.channel, lex.class_key(e.lemma)});
        for (const auto& [k, count] : holders) {
            bool majority = 2 * count >= n;
            if (majority != static_cast<bool>(te_classes.count(k)))
                bad.push_back(tag + "TE disagrees with majority for " + k.second);
        }
        for (const auto& e : icn.ev)
            if (te_classes.count({e.channel, lex.class_key(e.lemma)})) bad.push_back(tag + "EV element in a TE class");
        if (tag_image(icn) != icn.image) bad.push_back(tag + "image is not the member majority");
    }

    // detailing edges form a DAG
    std::map<IcnId, std::vector<IcnId>> kids;
    for (const auto& e : g.edges()) {
        if (!g.find(e.from) || !g.find(e.to)) bad.push_back("edge " + std::to_string(e.id) + " dangles");
        if (e.kind == EdgeKind::detailing) kids[e.from].push_back(e.to);
    }
    std::map<IcnId, int> state;
    std::function<bool(IcnId)> cyclic = [&](IcnId v) {
        state[v] = 1;
        for (auto w : kids[v]) {
            if (state[w] == 1) return true;
            if (state[w] == 0 && cyclic(w)) return true;
        }
        state[v] = 2;
        return false;
    };
    for (const auto& [id, icn] : g.icns())
        if (state[id] == 0 && cyclic(id)) bad.push_back("detailing cycle through ICN " + std::to_string(id));

    // fulfilled + unconsidered partition the problem image
    auto problem = problem_image(g, s.context);
    if (s.metrics.fulfilled_requirements.count + s.metrics.unconsidered_needs.count != static_cast<int>(problem.size()))
        bad.push_back("fulfilled + unconsidered != |problem image|");

    // converged is monotone in eps
    bool before = false;
    for (int eps = 0; eps <= 40; ++eps) {
        bool now = converged(s.top_down, s.bottom_up, eps);
        if (before && !now) bad.push_back("converged not monotone at eps " + std::to_string(eps));
        before = now;
    }

    // seq dense, adjustment loop bounded per idea
    std::map<std::pair<UtteranceId, int>, int> iterations;
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log[i].seq != static_cast<std::int64_t>(i + 1)) bad.push_back("seq gap at " + std::to_string(i + 1));
        if (log[i].kind == event_kind::adjustment_iteration) {
            const auto& idea = log[i].payload.at("idea");
            ++iterations[{idea.at("utterance").get<UtteranceId>(), idea.at("ordinal").get<int>()}];
        }
    }
    for (const auto& [key, n] : iterations)
        if (n > cfg.adjustment_cap) bad.push_back("adjustment loop exceeded the cap");

    // recomputed metrics agree
    auto again = compute(g, s.context, s.history, lex, cfg.metrics, s.metrics.at_utterance);
    if (!(again == s.metrics)) bad.push_back("metrics differ from a recomputation");
    return bad;
}

}  // namespace tt_test
