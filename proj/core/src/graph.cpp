#include "teamtrace/graph.hpp"

#include <algorithm>
#include <sstream>

#include "teamtrace/errors.hpp"
#include "teamtrace/ingest.hpp"
#include "teamtrace/text.hpp"

namespace teamtrace {

const Icn* ProcessGraph::find(IcnId id) const {
    auto it = icns_.find(id);
    return it == icns_.end() ? nullptr : &it->second;
}

const Icn& ProcessGraph::at(IcnId id) const {
    auto it = icns_.find(id);
    if (it == icns_.end()) throw ValidationError("unknown ICN " + std::to_string(id));
    return it->second;
}

void ProcessGraph::put(Icn icn) {
    if (icn.id <= 0) throw ValidationError("ICN id must be positive");
    next_icn_ = std::max(next_icn_, icn.id + 1);
    icns_[icn.id] = std::move(icn);
}

bool ProcessGraph::would_close_detailing_cycle(IcnId from, IcnId to) const {
    if (from == to) return true;
    // a cycle closes if `from` is reachable from `to` along detailing edges
    std::vector<IcnId> stack{to};
    std::set<IcnId> seen;
    while (!stack.empty()) {
        auto cur = stack.back();
        stack.pop_back();
        if (cur == from) return true;
        if (!seen.insert(cur).second) continue;
        for (const auto& e : edges_)
            if (e.kind == EdgeKind::detailing && e.from == cur) stack.push_back(e.to);
    }
    return false;
}

const Edge& ProcessGraph::add_edge(IcnId from, IcnId to, EdgeKind kind, ElementSet payload, IcnId context) {
    if (!find(from) || !find(to))
        throw ValidationError("edge " + std::to_string(from) + "->" + std::to_string(to) + " has an unknown endpoint");
    if (from == to) throw ValidationError("self loop on ICN " + std::to_string(from));
    if (kind == EdgeKind::detailing && would_close_detailing_cycle(from, to))
        throw ValidationError("detailing edge " + std::to_string(from) + "->" + std::to_string(to) +
                              " would close a cycle");
    edges_.push_back(Edge{next_edge_++, from, to, kind, std::move(payload), context});
    return edges_.back();
}

std::vector<IcnId> ProcessGraph::roots() const {
    std::set<IcnId> inner;
    for (const auto& e : edges_)
        if (e.kind == EdgeKind::detailing || e.kind == EdgeKind::exploration) inner.insert(e.to);
    std::vector<IcnId> out;
    for (const auto& [id, icn] : icns_)
        if (!inner.count(id)) out.push_back(id);
    return out;
}

std::optional<IcnId> ProcessGraph::detailing_parent(IcnId id) const {
    for (const auto& e : edges_)
        if (e.kind == EdgeKind::detailing && e.to == id) return e.from;
    return std::nullopt;
}

std::optional<IcnId> ProcessGraph::exploration_parent(IcnId id) const {
    for (const auto& e : edges_)
        if (e.kind == EdgeKind::exploration && e.to == id) return e.from;
    return std::nullopt;
}

std::vector<IcnId> ProcessGraph::detailing_children(IcnId id) const {
    std::vector<IcnId> out;
    for (const auto& e : edges_)
        if (e.kind == EdgeKind::detailing && e.from == id) out.push_back(e.to);
    return out;
}

IcnId ProcessGraph::context_of(IcnId id) const {
    auto cur = id;
    std::set<IcnId> seen;
    while (auto p = detailing_parent(cur)) {
        if (!seen.insert(cur).second) break;
        cur = *p;
    }
    if (auto ctx = exploration_parent(cur)) return *ctx;
    return cur;
}

IcnId ProcessGraph::root_of(IcnId id) const {
    auto cur = id;
    std::set<IcnId> seen;
    while (seen.insert(cur).second) {
        if (auto p = detailing_parent(cur)) cur = *p;
        else if (auto q = exploration_parent(cur)) cur = *q;
        else break;
    }
    return cur;
}

void ProcessGraph::remove_icn(IcnId id) {
    icns_.erase(id);
    std::erase_if(edges_, [&](const Edge& e) { return e.from == id || e.to == id; });
}

ProcessGraph ProcessGraph::restore(std::map<IcnId, Icn> icns, std::vector<Edge> edges, IcnId next_icn,
                                   int next_edge) {
    ProcessGraph g;
    for (auto& [id, icn] : icns) {
        if (id != icn.id) throw ValidationError("ICN key " + std::to_string(id) + " does not match its id");
        g.put(std::move(icn));
    }
    for (auto& e : edges) {
        if (!g.find(e.from) || !g.find(e.to)) throw ValidationError("edge " + std::to_string(e.id) + " dangles");
        if (e.kind == EdgeKind::detailing && g.would_close_detailing_cycle(e.from, e.to))
            throw ValidationError("edge " + std::to_string(e.id) + " closes a detailing cycle");
        g.edges_.push_back(std::move(e));
        g.next_edge_ = std::max(g.next_edge_, g.edges_.back().id + 1);
    }
    g.next_icn_ = std::max(g.next_icn_, next_icn);
    g.next_edge_ = std::max(g.next_edge_, next_edge);
    return g;
}

namespace {

MentalImageKind default_for(NatureKind n) {
    switch (n) {
        case NatureKind::problem_understanding: return MentalImageKind::problem;
        case NatureKind::solving_detailing: return MentalImageKind::existing_solution;
        case NatureKind::comparison:
        case NatureKind::pro_con_analysis: return MentalImageKind::expected_behavior;
        case NatureKind::missing_fragment:
        case NatureKind::localization: return MentalImageKind::needed_solution_changes;
        case NatureKind::required_change: return MentalImageKind::needed_problem_changes;
        case NatureKind::solving_highlevel:
        case NatureKind::combination: return MentalImageKind::desired_solution;
    }
    return MentalImageKind::desired_solution;
}

}  // namespace

MentalImageKind image_hint(const IdeaTriple& idea, NatureKind nature, const ContextState& ctx, const Lexicon& lex,
                           const NatureConfig& cfg) {
    if (problem_overlap(idea, ctx, lex) >= cfg.problem_overlap) return MentalImageKind::problem;
    if (auto cued = cue_image(idea, lex)) return *cued;
    return default_for(nature);
}

MentalImageKind tag_image(const Icn& icn) {
    std::map<MentalImageKind, int> count;
    std::map<MentalImageKind, int> first;
    for (int i = 0; i < static_cast<int>(icn.members.size()); ++i) {
        auto k = icn.members[static_cast<std::size_t>(i)].hint;
        ++count[k];
        first.emplace(k, i);
    }
    if (count.empty()) return MentalImageKind::desired_solution;
    auto best = count.begin()->first;
    for (const auto& [k, c] : count) {
        if (c > count[best] || (c == count[best] && first[k] < first[best])) best = k;
    }
    return best;
}

ElementSet image_elements(const ProcessGraph& g, const ContextState& ctx, const std::set<MentalImageKind>& kinds) {
    ElementSet out;
    if (kinds.count(MentalImageKind::problem)) out.insert(ctx.problem.begin(), ctx.problem.end());
    for (const auto& [id, icn] : g.icns()) {
        if (!kinds.count(icn.image)) continue;
        auto all = icn.all_elements();
        out.insert(all.begin(), all.end());
    }
    return out;
}

ElementSet problem_image(const ProcessGraph& g, const ContextState& ctx) {
    return image_elements(g, ctx, {MentalImageKind::problem});
}

ElementSet solution_image(const ProcessGraph& g, const ContextState& ctx) {
    return image_elements(g, ctx, {MentalImageKind::desired_solution, MentalImageKind::existing_solution});
}

namespace {

DeltaMeaning element_meaning(const Element& e, Direction d) {
    if (e.channel == Channel::output) return DeltaMeaning::wrong_output;
    if (d == Direction::top_down) return DeltaMeaning::missing_processing;
    return e.channel == Channel::verb ? DeltaMeaning::surplus : DeltaMeaning::missing_requirement;
}

}  // namespace

ImageDelta compare_images(const ElementSet& a, const ElementSet& b, const Lexicon& lex, Direction direction) {
    ImageDelta out;
    out.direction = direction;
    auto m = match(a, b, lex);
    for (const auto& e : m.unmatched_a) {
        bool present = std::any_of(b.begin(), b.end(), [&](const Element& o) { return lex.equivalent(e.lemma, o.lemma); });
        if (!present) out.delta.insert(e);
    }
    if (out.delta.empty()) return out;
    std::map<DeltaMeaning, int> votes;
    for (const auto& e : out.delta) ++votes[element_meaning(e, direction)];
    auto best = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it)
        if (it->second > best->second) best = it;
    out.meaning = best->first;
    return out;
}

bool converged(const ImageDelta& top_down, const ImageDelta& bottom_up, int eps) {
    auto e = static_cast<std::size_t>(std::max(eps, 0));
    return top_down.delta.size() <= e && bottom_up.delta.size() <= e;
}

SpaceMap solution_space_map(const ProcessGraph& g, const Lexicon& lex) {
    SpaceMap map;
    auto roots = g.roots();
    std::set<IcnId> root_set(roots.begin(), roots.end());
    for (const auto& [id, icn] : g.icns()) {
        bool solution = icn.image == MentalImageKind::desired_solution || icn.image == MentalImageKind::existing_solution;
        if (!solution) continue;
        if (root_set.count(id) || g.exploration_parent(id)) map.entries.push_back(id);
    }
    for (std::size_t i = 0; i < map.entries.size(); ++i) {
        for (std::size_t j = i + 1; j < map.entries.size(); ++j) {
            const auto& a = g.at(map.entries[i]);
            const auto& b = g.at(map.entries[j]);
            auto m = match(a.all_elements(), b.all_elements(), lex);
            map.pairs.push_back(SpacePair{a.id, b.id, similarity(m), m.unmatched_a, m.unmatched_b});
        }
    }
    return map;
}

namespace {

std::string_view edge_style(EdgeKind k) {
    switch (k) {
        case EdgeKind::detailing: return "solid";
        case EdgeKind::exploration: return "dashed";
        case EdgeKind::causality: return "bold";
        case EdgeKind::generalization: return "dotted";
    }
    return "solid";
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string to_dot(const ProcessGraph& g) {
    std::ostringstream os;
    os << "digraph process {\n";
    os << "  node [shape=box];\n";
    for (const auto& [id, icn] : g.icns()) {
        os << "  n" << id << " [label=\"ICN#" << id << " [" << to_string(icn.image) << "]\"];\n";
    }
    for (const auto& e : g.edges()) {
        std::string label(to_string(e.kind));
        if (!e.payload.empty()) {
            label += ":";
            bool first = true;
            for (const auto& p : e.payload) {
                label += (first ? " " : ", ") + p.lemma;
                first = false;
            }
        }
        os << "  n" << e.from << " -> n" << e.to << " [label=\"" << dot_escape(label) << "\", style="
           << edge_style(e.kind) << "];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace teamtrace
