#include "teamtrace/metrics.hpp"

#include <algorithm>

#include "teamtrace/errors.hpp"

namespace teamtrace {

namespace {

std::string icn_ref(IcnId id) { return "icn:" + std::to_string(id); }
std::string edge_ref(int id) { return "edge:" + std::to_string(id); }

bool is_solution(MentalImageKind k) {
    return k == MentalImageKind::desired_solution || k == MentalImageKind::existing_solution;
}
bool is_needed_change(MentalImageKind k) {
    return k == MentalImageKind::needed_solution_changes || k == MentalImageKind::needed_problem_changes;
}

}  // namespace

MetricsReport compute(const ProcessGraph& g, const ContextState& ctx, const std::vector<IdeaRecord>& history,
                      const Lexicon& lex, const MetricsConfig& cfg, UtteranceId at_utterance) {
    MetricsReport r;
    r.at_utterance = at_utterance;

    // (1) Fulfilled requirements: problem-image elements some solution-image
    // ICN addresses. (7) Unconsidered needs: the rest of the problem image.
    auto problem = problem_image(g, ctx);
    std::set<IcnId> fulfilling;
    for (const auto& p : problem) {
        bool hit = false;
        for (const auto& [id, icn] : g.icns()) {
            if (!is_solution(icn.image)) continue;
            auto all = icn.all_elements();
            if (std::any_of(all.begin(), all.end(), [&](const Element& e) { return lex.equivalent(e.lemma, p.lemma); })) {
                fulfilling.insert(id);
                hit = true;
            }
        }
        if (hit) ++r.fulfilled_requirements.count;
        else r.unconsidered_needs.elements.insert(p);
    }
    r.unconsidered_needs.count = static_cast<int>(r.unconsidered_needs.elements.size());
    if (!problem.empty())
        r.fulfilled_requirements.ratio = static_cast<double>(r.fulfilled_requirements.count) / static_cast<double>(problem.size());
    for (auto id : fulfilling) r.fulfilled_requirements.evidence.push_back(icn_ref(id));

    // (2) Exploration: alternatives opened, and switches between root trees in
    // utterance order.
    for (const auto& e : g.edges()) {
        if (e.kind != EdgeKind::exploration) continue;
        ++r.exploration.alternative_count;
        r.exploration.evidence.push_back(edge_ref(e.id));
    }
    std::optional<IcnId> prev_root;
    for (const auto& rec : history) {
        if (!g.find(rec.icn)) continue;
        auto root = g.root_of(rec.icn);
        if (prev_root && *prev_root != root) ++r.exploration.switch_count;
        prev_root = root;
    }

    // (3) Substantiated decisions: ideas that extend an existing cluster.
    int substantiated = 0;
    for (const auto& rec : history)
        if (rec.decision == Decision::join || rec.decision == Decision::new_detailing) ++substantiated;
    r.substantiated_decisions.orphan_count = static_cast<int>(history.size()) - substantiated;
    if (!history.empty())
        r.substantiated_decisions.ratio = static_cast<double>(substantiated) / static_cast<double>(history.size());

    auto image_of = [&](IcnId id) -> std::optional<MentalImageKind> {
        if (const auto* icn = g.find(id)) return icn->image;
        return std::nullopt;
    };

    // (4) Backtracking: returning to a cluster left alone for a while;
    // resolved when a needed-change image follows shortly.
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& rec = history[i];
        if (rec.decision != Decision::join) continue;
        std::optional<std::size_t> last;
        for (std::size_t j = i; j-- > 0;) {
            if (history[j].icn == rec.icn) {
                last = j;
                break;
            }
        }
        if (!last || static_cast<int>(i - *last) < cfg.backtrack_gap) continue;
        ++r.backtracking.count;
        for (std::size_t k = i + 1; k < history.size() && static_cast<int>(k - i) <= cfg.resolve_window; ++k) {
            auto img = image_of(history[k].icn);
            if (img && is_needed_change(*img)) {
                ++r.backtracking.resolved_count;
                break;
            }
        }
    }

    // (5) Contradictions: opposite meanings across different images, and
    // needed solution changes that collide with the existing solution.
    std::vector<const Icn*> icns;
    for (const auto& [id, icn] : g.icns()) icns.push_back(&icn);
    for (std::size_t i = 0; i < icns.size(); ++i) {
        for (std::size_t j = i + 1; j < icns.size(); ++j) {
            const auto& a = *icns[i];
            const auto& b = *icns[j];
            if (a.image != b.image) {
                for (const auto& x : a.all_elements())
                    for (const auto& y : b.all_elements())
                        if (lex.antonyms(x.lemma, y.lemma))
                            r.contradictions.pairs.push_back({x, y, a.id, b.id, "antonym"});
            }
            bool conflict_pair = (a.image == MentalImageKind::needed_solution_changes &&
                                  b.image == MentalImageKind::existing_solution) ||
                                 (b.image == MentalImageKind::needed_solution_changes &&
                                  a.image == MentalImageKind::existing_solution);
            if (!conflict_pair) continue;
            for (const auto& x : a.te)
                for (const auto& y : b.te)
                    if (lex.equivalent(x.lemma, y.lemma))
                        r.contradictions.pairs.push_back({x, y, a.id, b.id, "te_conflict"});
        }
    }
    r.contradictions.count = static_cast<int>(r.contradictions.pairs.size());

    // (6) Repetitions: near-verbatim restatements of a cluster's typical
    // elements; productive when a new detailing follows.
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& rec = history[i];
        if (rec.decision != Decision::join || rec.added_new_element) continue;
        if (rec.te_similarity < cfg.repetition_similarity) continue;
        ++r.repetitions.count;
        for (std::size_t k = i + 1; k < history.size() && static_cast<int>(k - i) <= cfg.productivity_window; ++k) {
            if (history[k].decision == Decision::new_detailing) {
                ++r.repetitions.productive_count;
                break;
            }
        }
    }

    // (8) Unexplored items: desired-solution ideas never detailed.
    for (const auto& [id, icn] : g.icns()) {
        if (icn.image == MentalImageKind::desired_solution && g.detailing_children(id).empty())
            r.unexplored_items.icn_ids.push_back(id);
    }
    r.unexplored_items.count = static_cast<int>(r.unexplored_items.icn_ids.size());
    return r;
}

bool MetricsDelta::zero() const {
    return new_evidence.empty() &&
           std::all_of(changes.begin(), changes.end(), [](const auto& kv) { return kv.second == 0.0; });
}

namespace {

std::vector<std::string> evidence_of(const MetricsReport& r) {
    std::vector<std::string> out = r.fulfilled_requirements.evidence;
    out.insert(out.end(), r.exploration.evidence.begin(), r.exploration.evidence.end());
    for (auto id : r.unexplored_items.icn_ids) out.push_back(icn_ref(id));
    for (const auto& e : r.unconsidered_needs.elements) out.push_back("element:" + e.lemma);
    for (const auto& p : r.contradictions.pairs)
        out.push_back("contradiction:" + std::to_string(p.icn_a) + ":" + p.a.lemma + ":" + std::to_string(p.icn_b) +
                      ":" + p.b.lemma);
    return out;
}

}  // namespace

MetricsDelta delta_report(const MetricsReport& prev, const MetricsReport& cur) {
    if (prev.at_utterance > cur.at_utterance)
        throw ValidationError("delta_report: previous report (utterance " + std::to_string(prev.at_utterance) +
                              ") is later than current (utterance " + std::to_string(cur.at_utterance) + ")");
    MetricsDelta d;
    d.from = prev.at_utterance;
    d.to = cur.at_utterance;
    auto put = [&](const char* key, double a, double b) { d.changes[key] = b - a; };
    put("fulfilled_requirements.count", prev.fulfilled_requirements.count, cur.fulfilled_requirements.count);
    put("fulfilled_requirements.ratio", prev.fulfilled_requirements.ratio, cur.fulfilled_requirements.ratio);
    put("exploration.alternative_count", prev.exploration.alternative_count, cur.exploration.alternative_count);
    put("exploration.switch_count", prev.exploration.switch_count, cur.exploration.switch_count);
    put("substantiated_decisions.ratio", prev.substantiated_decisions.ratio, cur.substantiated_decisions.ratio);
    put("substantiated_decisions.orphan_count", prev.substantiated_decisions.orphan_count,
        cur.substantiated_decisions.orphan_count);
    put("backtracking.count", prev.backtracking.count, cur.backtracking.count);
    put("backtracking.resolved_count", prev.backtracking.resolved_count, cur.backtracking.resolved_count);
    put("contradictions.count", prev.contradictions.count, cur.contradictions.count);
    put("repetitions.count", prev.repetitions.count, cur.repetitions.count);
    put("repetitions.productive_count", prev.repetitions.productive_count, cur.repetitions.productive_count);
    put("unconsidered_needs.count", prev.unconsidered_needs.count, cur.unconsidered_needs.count);
    put("unexplored_items.count", prev.unexplored_items.count, cur.unexplored_items.count);

    auto before = evidence_of(prev);
    std::set<std::string> seen(before.begin(), before.end());
    for (auto& e : evidence_of(cur))
        if (!seen.count(e)) d.new_evidence.push_back(std::move(e));
    return d;
}

}  // namespace teamtrace
