#include "teamtrace/serialize.hpp"

#include "teamtrace/errors.hpp"

namespace teamtrace {

std::string canonical(const Json& j) { return j.dump(); }

namespace {

template <typename E, typename Parse>
E enum_from(const Json& j, Parse parse, const char* what) {
    auto s = j.get<std::string>();
    auto v = parse(s);
    if (!v) throw ValidationError(std::string("unknown ") + what + ": '" + s + "'");
    return *v;
}

Json elements_json(const ElementSet& s) {
    Json arr = Json::array();
    for (const auto& e : s) arr.push_back(e);
    return arr;
}

ElementSet elements_from(const Json& j) {
    ElementSet out;
    for (const auto& e : j) out.insert(e.get<Element>());
    return out;
}

template <typename T>
T value_or(const Json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

}  // namespace

void to_json(Json& j, const Element& e) { j = Json{{"channel", to_string(e.channel)}, {"lemma", e.lemma}}; }

void from_json(const Json& j, Element& e) {
    e.channel = enum_from<Channel>(j.at("channel"), channel_from_string, "channel");
    e.lemma = j.at("lemma").get<std::string>();
}

void to_json(Json& j, const IdeaTriple& t) {
    j = Json{{"verb", t.verb},
             {"noun1", t.noun1 ? Json(*t.noun1) : Json(nullptr)},
             {"noun2", t.noun2},
             {"modifiers", t.modifiers},
             {"source_utterance", t.source_utterance},
             {"ordinal", t.ordinal},
             {"assertion_only", t.assertion_only},
             {"out_of_lexicon", t.out_of_lexicon},
             {"clause", t.clause}};
}

void from_json(const Json& j, IdeaTriple& t) {
    if (!j.is_object()) throw ValidationError("idea triple must be an object");
    t.verb = value_or<std::string>(j, "verb", "");
    t.noun1.reset();
    if (auto it = j.find("noun1"); it != j.end() && !it->is_null()) t.noun1 = it->get<std::string>();
    t.noun2 = value_or<std::vector<std::string>>(j, "noun2", {});
    t.modifiers = value_or<std::vector<std::string>>(j, "modifiers", {});
    t.source_utterance = value_or<UtteranceId>(j, "source_utterance", 0);
    t.ordinal = value_or<int>(j, "ordinal", 0);
    t.assertion_only = value_or<bool>(j, "assertion_only", false);
    t.out_of_lexicon = value_or<std::vector<std::string>>(j, "out_of_lexicon", {});
    t.clause = value_or<std::string>(j, "clause", "");
}

void to_json(Json& j, const Utterance& u) {
    j = Json{{"id", u.id}, {"session", u.session}, {"speaker", u.speaker}, {"t", u.t_ms}, {"text", u.text}};
    if (u.pre_annotation) j["pre_annotation"] = *u.pre_annotation;
}

void from_json(const Json& j, Utterance& u) {
    if (!j.is_object()) throw ValidationError("utterance must be an object");
    if (!j.contains("id") || !j.at("id").is_number_integer()) throw ValidationError("utterance needs an integer id");
    u.id = j.at("id").get<UtteranceId>();
    u.session = value_or<std::string>(j, "session", "");
    u.speaker = value_or<std::string>(j, "speaker", "");
    u.t_ms = value_or<std::int64_t>(j, "t", 0);
    u.text = value_or<std::string>(j, "text", "");
    u.pre_annotation.reset();
    if (auto it = j.find("pre_annotation"); it != j.end() && !it->is_null())
        u.pre_annotation = it->get<std::vector<IdeaTriple>>();
}

void to_json(Json& j, const RelationTemplate& r) {
    j = Json{{"verb", r.verb},
             {"object_class", r.object_class},
             {"output", r.output ? Json(*r.output) : Json(nullptr)},
             {"goal", r.goal ? Json(*r.goal) : Json(nullptr)}};
}

void to_json(Json& j, const IcnMember& m) {
    j = Json{{"utterance", m.utterance},
             {"ordinal", m.ordinal},
             {"index", m.index},
             {"elements", elements_json(m.elements)},
             {"hint", to_string(m.hint)}};
}

void from_json(const Json& j, IcnMember& m) {
    m.utterance = j.at("utterance").get<UtteranceId>();
    m.ordinal = j.at("ordinal").get<int>();
    m.index = j.at("index").get<int>();
    m.elements = elements_from(j.at("elements"));
    m.hint = enum_from<MentalImageKind>(j.at("hint"), image_kind_from_string, "image kind");
}

void to_json(Json& j, const Icn& icn) {
    j = Json{{"id", icn.id},
             {"members", icn.members},
             {"slots",
              Json{{"verbs", icn.slots.verbs},
                   {"targets", icn.slots.targets},
                   {"expected_outputs", icn.slots.expected_outputs}}},
             {"te", elements_json(icn.te)},
             {"ev", elements_json(icn.ev)},
             {"goals", icn.goals},
             {"image", to_string(icn.image)},
             {"created_at", icn.created_at}};
}

void from_json(const Json& j, Icn& icn) {
    icn.id = j.at("id").get<IcnId>();
    icn.members = j.at("members").get<std::vector<IcnMember>>();
    const auto& s = j.at("slots");
    icn.slots.verbs = s.at("verbs").get<std::map<std::string, int>>();
    icn.slots.targets = s.at("targets").get<std::map<std::string, int>>();
    icn.slots.expected_outputs = s.at("expected_outputs").get<std::map<std::string, int>>();
    icn.te = elements_from(j.at("te"));
    icn.ev = elements_from(j.at("ev"));
    icn.goals = j.at("goals").get<std::set<std::string>>();
    icn.image = enum_from<MentalImageKind>(j.at("image"), image_kind_from_string, "image kind");
    icn.created_at = j.at("created_at").get<UtteranceId>();
}

void to_json(Json& j, const Edge& e) {
    j = Json{{"id", e.id},
             {"from", e.from},
             {"to", e.to},
             {"kind", to_string(e.kind)},
             {"payload", elements_json(e.payload)},
             {"context", e.context}};
}

void from_json(const Json& j, Edge& e) {
    e.id = j.at("id").get<int>();
    e.from = j.at("from").get<IcnId>();
    e.to = j.at("to").get<IcnId>();
    e.kind = enum_from<EdgeKind>(j.at("kind"), edge_kind_from_string, "edge kind");
    e.payload = elements_from(j.at("payload"));
    e.context = j.at("context").get<IcnId>();
}

void to_json(Json& j, const ProcessGraph& g) {
    Json icns = Json::array();
    for (const auto& [id, icn] : g.icns()) icns.push_back(icn);
    j = Json{{"icns", icns}, {"edges", g.edges()}, {"next_icn", g.next_icn_id()}, {"next_edge", g.next_edge_id()}};
}

void from_json(const Json& j, ProcessGraph& g) {
    if (!j.is_object()) throw ValidationError("graph must be an object");
    std::map<IcnId, Icn> icns;
    for (const auto& item : j.at("icns")) {
        auto icn = item.get<Icn>();
        auto id = icn.id;
        if (!icns.emplace(id, std::move(icn)).second)
            throw ValidationError("duplicate ICN id " + std::to_string(id));
    }
    auto edges = j.at("edges").get<std::vector<Edge>>();
    g = ProcessGraph::restore(std::move(icns), std::move(edges), j.at("next_icn").get<IcnId>(),
                              j.at("next_edge").get<int>());
}

void to_json(Json& j, const ConceptActivation& a) { j = Json{{"activated", a.activated}, {"source", a.source}}; }

void from_json(const Json& j, ConceptActivation& a) {
    a.activated = j.at("activated").get<std::map<std::string, double>>();
    a.source = j.at("source").get<std::string>();
}

void to_json(Json& j, const ImmediateEntry& e) {
    j = Json{{"idea", e.idea}, {"icn", e.icn}, {"weight", e.weight}, {"goals", e.goals}};
}

void from_json(const Json& j, ImmediateEntry& e) {
    e.idea = j.at("idea").get<IdeaTriple>();
    e.icn = j.at("icn").get<IcnId>();
    e.weight = j.at("weight").get<double>();
    e.goals = j.at("goals").get<std::set<std::string>>();
}

void to_json(Json& j, const MediumEntry& m) {
    j = Json{{"icn", m.icn}, {"te_lemmas", m.te_lemmas}, {"score", m.score}};
}

void from_json(const Json& j, MediumEntry& m) {
    m.icn = j.at("icn").get<IcnId>();
    m.te_lemmas = j.at("te_lemmas").get<std::set<std::string>>();
    m.score = j.at("score").get<double>();
}

void to_json(Json& j, const ContextState& c) {
    j = Json{{"immediate", c.immediate},
             {"medium", c.medium},
             {"activation", c.activation},
             {"problem", elements_json(c.problem)}};
}

void from_json(const Json& j, ContextState& c) {
    c.immediate = j.at("immediate").get<std::vector<ImmediateEntry>>();
    c.medium = j.at("medium").get<std::vector<MediumEntry>>();
    c.activation = j.at("activation").get<ConceptActivation>();
    c.problem = elements_from(j.at("problem"));
}

void to_json(Json& j, const ImageDelta& d) {
    j = Json{{"delta", elements_json(d.delta)},
             {"meaning", to_string(d.meaning)},
             {"direction", to_string(d.direction)}};
}

void from_json(const Json& j, ImageDelta& d) {
    d.delta = elements_from(j.at("delta"));
    d.meaning = enum_from<DeltaMeaning>(j.at("meaning"), delta_meaning_from_string, "delta meaning");
    d.direction = enum_from<Direction>(j.at("direction"), direction_from_string, "direction");
}

void to_json(Json& j, const SpaceMap& m) {
    Json pairs = Json::array();
    for (const auto& p : m.pairs)
        pairs.push_back(Json{{"a", p.a},
                             {"b", p.b},
                             {"similarity", p.similarity},
                             {"unmatched_a", elements_json(p.unmatched_a)},
                             {"unmatched_b", elements_json(p.unmatched_b)}});
    j = Json{{"entries", m.entries}, {"pairs", pairs}};
}

void to_json(Json& j, const IdeaRecord& r) {
    j = Json{{"index", r.index},
             {"utterance", r.utterance},
             {"ordinal", r.ordinal},
             {"icn", r.icn},
             {"decision", to_string(r.decision)},
             {"target", r.target},
             {"score", r.score},
             {"te_similarity", r.te_similarity},
             {"added_new_element", r.added_new_element},
             {"nature", to_string(r.nature)},
             {"hint", to_string(r.hint)}};
}

void from_json(const Json& j, IdeaRecord& r) {
    r.index = j.at("index").get<int>();
    r.utterance = j.at("utterance").get<UtteranceId>();
    r.ordinal = j.at("ordinal").get<int>();
    r.icn = j.at("icn").get<IcnId>();
    r.decision = enum_from<Decision>(j.at("decision"), decision_from_string, "decision");
    r.target = j.at("target").get<IcnId>();
    r.score = j.at("score").get<double>();
    r.te_similarity = j.at("te_similarity").get<double>();
    r.added_new_element = j.at("added_new_element").get<bool>();
    r.nature = enum_from<NatureKind>(j.at("nature"), nature_from_string, "nature");
    r.hint = enum_from<MentalImageKind>(j.at("hint"), image_kind_from_string, "image kind");
}

void to_json(Json& j, const ContradictionPair& p) {
    j = Json{{"a", p.a}, {"b", p.b}, {"icn_a", p.icn_a}, {"icn_b", p.icn_b}, {"reason", p.reason}};
}

void from_json(const Json& j, ContradictionPair& p) {
    p.a = j.at("a").get<Element>();
    p.b = j.at("b").get<Element>();
    p.icn_a = j.at("icn_a").get<IcnId>();
    p.icn_b = j.at("icn_b").get<IcnId>();
    p.reason = j.at("reason").get<std::string>();
}

void to_json(Json& j, const MetricsReport& r) {
    j = Json{
        {"fulfilled_requirements",
         Json{{"count", r.fulfilled_requirements.count},
              {"ratio", r.fulfilled_requirements.ratio},
              {"evidence", r.fulfilled_requirements.evidence}}},
        {"exploration",
         Json{{"alternative_count", r.exploration.alternative_count},
              {"switch_count", r.exploration.switch_count},
              {"evidence", r.exploration.evidence}}},
        {"substantiated_decisions",
         Json{{"ratio", r.substantiated_decisions.ratio}, {"orphan_count", r.substantiated_decisions.orphan_count}}},
        {"backtracking", Json{{"count", r.backtracking.count}, {"resolved_count", r.backtracking.resolved_count}}},
        {"contradictions", Json{{"count", r.contradictions.count}, {"pairs", r.contradictions.pairs}}},
        {"repetitions", Json{{"count", r.repetitions.count}, {"productive_count", r.repetitions.productive_count}}},
        {"unconsidered_needs",
         Json{{"count", r.unconsidered_needs.count}, {"elements", elements_json(r.unconsidered_needs.elements)}}},
        {"unexplored_items", Json{{"count", r.unexplored_items.count}, {"icn_ids", r.unexplored_items.icn_ids}}},
        {"at_utterance", r.at_utterance}};
}

void from_json(const Json& j, MetricsReport& r) {
    const auto& f = j.at("fulfilled_requirements");
    r.fulfilled_requirements.count = f.at("count").get<int>();
    r.fulfilled_requirements.ratio = f.at("ratio").get<double>();
    r.fulfilled_requirements.evidence = f.at("evidence").get<std::vector<std::string>>();
    const auto& e = j.at("exploration");
    r.exploration.alternative_count = e.at("alternative_count").get<int>();
    r.exploration.switch_count = e.at("switch_count").get<int>();
    r.exploration.evidence = e.at("evidence").get<std::vector<std::string>>();
    const auto& s = j.at("substantiated_decisions");
    r.substantiated_decisions.ratio = s.at("ratio").get<double>();
    r.substantiated_decisions.orphan_count = s.at("orphan_count").get<int>();
    r.backtracking.count = j.at("backtracking").at("count").get<int>();
    r.backtracking.resolved_count = j.at("backtracking").at("resolved_count").get<int>();
    r.contradictions.count = j.at("contradictions").at("count").get<int>();
    r.contradictions.pairs = j.at("contradictions").at("pairs").get<std::vector<ContradictionPair>>();
    r.repetitions.count = j.at("repetitions").at("count").get<int>();
    r.repetitions.productive_count = j.at("repetitions").at("productive_count").get<int>();
    r.unconsidered_needs.count = j.at("unconsidered_needs").at("count").get<int>();
    r.unconsidered_needs.elements = elements_from(j.at("unconsidered_needs").at("elements"));
    r.unexplored_items.count = j.at("unexplored_items").at("count").get<int>();
    r.unexplored_items.icn_ids = j.at("unexplored_items").at("icn_ids").get<std::vector<IcnId>>();
    r.at_utterance = j.at("at_utterance").get<UtteranceId>();
}

void to_json(Json& j, const MetricsDelta& d) {
    j = Json{{"from", d.from}, {"to", d.to}, {"changes", d.changes}, {"new_evidence", d.new_evidence}};
}

void to_json(Json& j, const SessionConfig& c) {
    j = Json::object();
    for (const auto& [key, value] : config_entries(c)) j[key] = value;
}

namespace {

void apply_json(SessionConfig& cfg, const std::string& prefix, const Json& j) {
    for (const auto& [key, value] : j.items()) {
        auto name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            apply_json(cfg, name, value);
        } else if (value.is_string()) {
            apply_setting(cfg, name, value.get<std::string>());
        } else if (value.is_number() || value.is_boolean()) {
            apply_setting(cfg, name, value.dump());
        } else {
            throw ConfigError("config key '" + name + "' has an unsupported value");
        }
    }
}

}  // namespace

SessionConfig config_from_json(const Json& j, SessionConfig base) {
    if (j.is_null()) return base;
    if (!j.is_object()) throw ConfigError("config overrides must be an object");
    apply_json(base, "", j);
    validate(base);
    return base;
}

}  // namespace teamtrace
