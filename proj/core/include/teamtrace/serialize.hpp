#pragma once

#include <string>

#include <json.hpp>

#include "teamtrace/config.hpp"
#include "teamtrace/context.hpp"
#include "teamtrace/graph.hpp"
#include "teamtrace/icn.hpp"
#include "teamtrace/idea.hpp"
#include "teamtrace/metrics.hpp"

namespace teamtrace {

using Json = nlohmann::json;

// Objects are key-sorted, so dump() of any value built here is canonical.
std::string canonical(const Json& j);

void to_json(Json& j, const Element& e);
void from_json(const Json& j, Element& e);
void to_json(Json& j, const IdeaTriple& t);
void from_json(const Json& j, IdeaTriple& t);
void to_json(Json& j, const Utterance& u);
void from_json(const Json& j, Utterance& u);
void to_json(Json& j, const RelationTemplate& r);

void to_json(Json& j, const IcnMember& m);
void from_json(const Json& j, IcnMember& m);
void to_json(Json& j, const Icn& icn);
void from_json(const Json& j, Icn& icn);
void to_json(Json& j, const Edge& e);
void from_json(const Json& j, Edge& e);
void to_json(Json& j, const ProcessGraph& g);
void from_json(const Json& j, ProcessGraph& g);

void to_json(Json& j, const ConceptActivation& a);
void from_json(const Json& j, ConceptActivation& a);
void to_json(Json& j, const ImmediateEntry& e);
void from_json(const Json& j, ImmediateEntry& e);
void to_json(Json& j, const MediumEntry& m);
void from_json(const Json& j, MediumEntry& m);
void to_json(Json& j, const ContextState& c);
void from_json(const Json& j, ContextState& c);

void to_json(Json& j, const ImageDelta& d);
void from_json(const Json& j, ImageDelta& d);
void to_json(Json& j, const SpaceMap& m);

void to_json(Json& j, const IdeaRecord& r);
void from_json(const Json& j, IdeaRecord& r);
void to_json(Json& j, const ContradictionPair& p);
void from_json(const Json& j, ContradictionPair& p);
void to_json(Json& j, const MetricsReport& r);
void from_json(const Json& j, MetricsReport& r);
void to_json(Json& j, const MetricsDelta& d);

void to_json(Json& j, const SessionConfig& c);
// Applies every key of a flat or nested object as config overrides.
SessionConfig config_from_json(const Json& j, SessionConfig base = {});

}  // namespace teamtrace
