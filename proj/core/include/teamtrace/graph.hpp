#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "teamtrace/config.hpp"
#include "teamtrace/context.hpp"
#include "teamtrace/icn.hpp"
#include "teamtrace/lexicon.hpp"

namespace teamtrace {

struct Edge {
    int id = 0;
    IcnId from = 0;
    IcnId to = 0;
    EdgeKind kind = EdgeKind::detailing;
    ElementSet payload;  // detailed elements (detailing edges)
    IcnId context = 0;   // shared context ICN (exploration edges)

    bool operator==(const Edge&) const = default;
};

// ICNs plus typed edges. Detailing edges run parent -> detail, exploration
// edges run context -> alternative, generalization edges run specific -> general.
class ProcessGraph {
public:
    const std::map<IcnId, Icn>& icns() const noexcept { return icns_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    bool empty() const noexcept { return icns_.empty(); }

    const Icn* find(IcnId id) const;
    const Icn& at(IcnId id) const;

    IcnId allocate_id() { return next_icn_++; }
    void put(Icn icn);

    // Throws ValidationError for unknown endpoints, self loops, or a detailing
    // edge that would close a cycle.
    const Edge& add_edge(IcnId from, IcnId to, EdgeKind kind, ElementSet payload = {}, IcnId context = 0);
    bool would_close_detailing_cycle(IcnId from, IcnId to) const;

    // ICNs without an incoming detailing or exploration edge, ascending.
    std::vector<IcnId> roots() const;
    std::optional<IcnId> detailing_parent(IcnId id) const;
    std::optional<IcnId> exploration_parent(IcnId id) const;
    std::vector<IcnId> detailing_children(IcnId id) const;

    // Top of the detailing chain above `id`, then its exploration context if any.
    IcnId context_of(IcnId id) const;
    // Follows detailing and exploration parents to a root.
    IcnId root_of(IcnId id) const;

    // Drops the ICN and every edge touching it.
    void remove_icn(IcnId id);

    IcnId next_icn_id() const noexcept { return next_icn_; }
    int next_edge_id() const noexcept { return next_edge_; }

    static ProcessGraph restore(std::map<IcnId, Icn> icns, std::vector<Edge> edges, IcnId next_icn, int next_edge);

    bool operator==(const ProcessGraph&) const = default;

private:
    std::map<IcnId, Icn> icns_;
    std::vector<Edge> edges_;
    IcnId next_icn_ = 1;
    int next_edge_ = 1;
};

// Per-idea image hint: problem-statement overlap, then lexicon cues in a
// fixed priority, then a default derived from the idea's nature.
MentalImageKind image_hint(const IdeaTriple& idea, NatureKind nature, const ContextState& ctx, const Lexicon& lex,
                           const NatureConfig& cfg = {});

// The ICN's image: most frequent member hint, ties to the hint seen first.
MentalImageKind tag_image(const Icn& icn);

struct ImageDelta {
    ElementSet delta;
    DeltaMeaning meaning = DeltaMeaning::none;
    Direction direction = Direction::top_down;

    bool operator==(const ImageDelta&) const = default;
};

// Union of TE and EV over every ICN carrying one of `kinds`; the problem image
// also includes the problem-statement elements.
ElementSet image_elements(const ProcessGraph& g, const ContextState& ctx, const std::set<MentalImageKind>& kinds);
ElementSet problem_image(const ProcessGraph& g, const ContextState& ctx);
ElementSet solution_image(const ProcessGraph& g, const ContextState& ctx);

// Elements of `a` left unmatched by `b` (and absent from `b` under synonym
// closure), with a categorical meaning.
ImageDelta compare_images(const ElementSet& a, const ElementSet& b, const Lexicon& lex, Direction direction);

bool converged(const ImageDelta& top_down, const ImageDelta& bottom_up, int eps);

struct SpacePair {
    IcnId a = 0;
    IcnId b = 0;
    double similarity = 0.0;
    ElementSet unmatched_a;
    ElementSet unmatched_b;

    bool operator==(const SpacePair&) const = default;
};

struct SpaceMap {
    std::vector<IcnId> entries;
    std::vector<SpacePair> pairs;

    bool operator==(const SpaceMap&) const = default;
};

// Solution-image ICNs that are roots or exploration alternatives, with
// pairwise similarity and unmatched fragments.
SpaceMap solution_space_map(const ProcessGraph& g, const Lexicon& lex);

// Graphviz rendering: nodes "ICN#id [image]", edge style per kind.
std::string to_dot(const ProcessGraph& g);

}  // namespace teamtrace
