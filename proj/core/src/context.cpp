#include "teamtrace/context.hpp"

#include <algorithm>

#include "teamtrace/graph.hpp"

namespace teamtrace {

std::set<std::string> RelationSet::outputs() const {
    std::set<std::string> out;
    for (const auto& r : relations)
        if (r.output) out.insert(*r.output);
    return out;
}

std::set<std::string> RelationSet::goals() const {
    std::set<std::string> out;
    for (const auto& r : relations)
        if (r.goal) out.insert(*r.goal);
    return out;
}

ConceptActivation activate_concepts(const std::string& trigger, const Lexicon& lex, const ContextConfig& cfg) {
    ConceptActivation act;
    act.source = trigger;
    auto raise = [&](const std::string& lemma, double w) {
        auto& slot = act.activated[lemma];
        slot = std::max(slot, w);
    };
    raise(trigger, cfg.weight_trigger);
    if (!lex.is_known(trigger)) return act;

    std::set<std::string> closure{trigger};
    if (const auto* syn = lex.synonyms_of(trigger)) closure.insert(syn->begin(), syn->end());
    for (const auto& s : closure)
        if (s != trigger) raise(s, cfg.weight_synonym);

    for (const auto& [verb, templates] : lex.verb_relations) {
        for (const auto& t : templates) {
            auto members = t.lemmas();
            bool hit = std::any_of(closure.begin(), closure.end(), [&](const auto& c) { return members.count(c); });
            if (!hit) continue;
            for (const auto& m : members)
                if (!closure.count(m)) raise(m, cfg.weight_neighbor);
        }
    }
    return act;
}

namespace {

std::set<std::string> entry_lemmas(const ImmediateEntry& e, const ContextState& ctx) {
    auto out = content_lemmas(e.idea);
    for (const auto& m : ctx.medium) {
        if (m.icn == e.icn) {
            out.insert(m.te_lemmas.begin(), m.te_lemmas.end());
            break;
        }
    }
    return out;
}

double overlap_score(const std::set<std::string>& lemmas, const ConceptActivation& act) {
    double s = 0.0;
    for (const auto& l : lemmas) {
        auto it = act.activated.find(l);
        if (it != act.activated.end()) s += it->second;
    }
    return s;
}

void rank_medium(std::vector<MediumEntry>& medium) {
    std::stable_sort(medium.begin(), medium.end(), [](const MediumEntry& a, const MediumEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.icn < b.icn;
    });
}

}  // namespace

ContextState adjust_work_context(const ConceptActivation& act, ContextState ctx, const ContextConfig& cfg) {
    std::vector<ImmediateEntry> kept;
    kept.reserve(ctx.immediate.size());
    for (auto& e : ctx.immediate) {
        auto lemmas = entry_lemmas(e, ctx);
        bool overlaps = std::any_of(lemmas.begin(), lemmas.end(), [&](const auto& l) { return act.activated.count(l); });
        e.weight = overlaps ? 1.0 : e.weight * cfg.decay;
        if (e.weight >= cfg.evict_threshold) kept.push_back(std::move(e));
    }
    ctx.immediate = std::move(kept);
    for (auto& m : ctx.medium) m.score = overlap_score(m.te_lemmas, act);
    rank_medium(ctx.medium);
    ctx.activation = act;
    return ctx;
}

RelationSet activate_relations(const std::string& verb, const ContextState& ctx, const Lexicon& lex) {
    RelationSet out;
    const auto& all = lex.relations(verb);
    for (const auto& t : all) {
        bool hit = std::any_of(t.object_class.begin(), t.object_class.end(),
                               [&](const auto& o) { return ctx.activation.activated.count(o) != 0; });
        if (hit) out.relations.push_back(t);
    }
    if (out.relations.empty()) out.relations = all;
    return out;
}

ContextState advance(ContextState ctx, const IdeaTriple& idea, IcnId icn, std::set<std::string> goals,
                     const ContextConfig& cfg) {
    ctx.immediate.push_back(ImmediateEntry{idea, icn, 1.0, std::move(goals)});
    auto cap = static_cast<std::size_t>(std::max(cfg.window, 0));
    while (ctx.immediate.size() > cap) ctx.immediate.erase(ctx.immediate.begin());
    return ctx;
}

void sync_medium(ContextState& ctx, const ProcessGraph& graph) {
    std::map<IcnId, double> scores;
    for (const auto& m : ctx.medium) scores[m.icn] = m.score;
    ctx.medium.clear();
    for (const auto& [id, icn] : graph.icns()) {
        auto it = scores.find(id);
        ctx.medium.push_back(MediumEntry{id, lemmas_of(icn.te), it == scores.end() ? 0.0 : it->second});
    }
    rank_medium(ctx.medium);
}

void forget_icn(ContextState& ctx, IcnId icn) {
    std::erase_if(ctx.medium, [&](const MediumEntry& m) { return m.icn == icn; });
    std::erase_if(ctx.immediate, [&](const ImmediateEntry& e) { return e.icn == icn; });
}

std::string activation_trigger(const IdeaTriple& idea) {
    if (idea.noun1 && !idea.noun1->empty()) return *idea.noun1;
    if (!idea.noun2.empty()) return idea.noun2.front();
    if (!idea.modifiers.empty()) return idea.modifiers.front();
    return idea.verb;
}

}  // namespace teamtrace
