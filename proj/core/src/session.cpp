#include "teamtrace/session.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>

#include "teamtrace/errors.hpp"
#include "teamtrace/ingest.hpp"
#include "teamtrace/text.hpp"

namespace teamtrace {

bool known_event_kind(const std::string& kind) {
    static const std::set<std::string> kinds = {
        event_kind::session_opened,  event_kind::utterance_received,   event_kind::utterance_rejected,
        event_kind::ideas_extracted, event_kind::context_adjusted,     event_kind::adjustment_iteration,
        event_kind::icn_created,     event_kind::icn_joined,           event_kind::edge_added,
        event_kind::image_tagged,    event_kind::delta_computed,       event_kind::metrics_updated,
        event_kind::error,
    };
    return kinds.count(kind) != 0;
}

void to_json(Json& j, const SessionEvent& e) { j = Json{{"seq", e.seq}, {"kind", e.kind}, {"payload", e.payload}}; }

void from_json(const Json& j, SessionEvent& e) {
    if (!j.is_object()) throw ReplayError("event must be an object");
    if (!j.contains("seq") || !j.at("seq").is_number_integer()) throw ReplayError("event without integer seq");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ReplayError("event without kind");
    e.seq = j.at("seq").get<std::int64_t>();
    e.kind = j.at("kind").get<std::string>();
    e.payload = j.contains("payload") ? j.at("payload") : Json::object();
}

std::string match_signature(const MatchResult& m) {
    Json pairs = Json::array();
    for (const auto& p : m.matched_pairs) pairs.push_back(Json::array({p.a, p.b}));
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : pairs.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void to_json(Json& j, const Snapshot& s) {
    j = Json{{"graph", s.graph},
             {"context", s.context},
             {"metrics", s.metrics},
             {"history", s.history},
             {"deltas", Json{{"top_down", s.top_down}, {"bottom_up", s.bottom_up}, {"converged", s.converged}}},
             {"problem_statement", s.problem_statement},
             {"last_seq", s.last_seq},
             {"last_utterance", s.last_utterance ? Json(*s.last_utterance) : Json(nullptr)},
             {"last_t", s.last_t}};
}

void from_json(const Json& j, Snapshot& s) {
    if (!j.is_object()) throw ValidationError("snapshot must be an object");
    s.graph = j.at("graph").get<ProcessGraph>();
    s.context = j.at("context").get<ContextState>();
    s.metrics = j.at("metrics").get<MetricsReport>();
    s.history = j.at("history").get<std::vector<IdeaRecord>>();
    const auto& d = j.at("deltas");
    s.top_down = d.at("top_down").get<ImageDelta>();
    s.bottom_up = d.at("bottom_up").get<ImageDelta>();
    s.converged = d.at("converged").get<bool>();
    s.problem_statement = j.at("problem_statement").get<std::string>();
    s.last_seq = j.at("last_seq").get<std::int64_t>();
    s.last_utterance.reset();
    if (!j.at("last_utterance").is_null()) s.last_utterance = j.at("last_utterance").get<UtteranceId>();
    s.last_t = j.at("last_t").get<std::int64_t>();
}

ElementSet problem_elements(const std::string& statement, const Lexicon& lex) {
    ElementSet out;
    if (text::trim(statement).empty()) return out;
    Utterance u;
    u.text = statement;
    for (const auto& t : extract_ideas(u, lex))
        for (const auto& e : elements_of(t))
            if (e.channel != Channel::verb) out.insert(e);
    return out;
}

struct Session::State {
    Snapshot current;
};

namespace {

using Emit = std::function<void(const char*, Json)>;

std::set<std::string> entry_lemmas(const ImmediateEntry& e, const ProcessGraph& g) {
    auto out = content_lemmas(e.idea);
    if (const auto* icn = g.find(e.icn))
        for (const auto& el : icn->te) out.insert(el.lemma);
    return out;
}

ElementSet entry_elements(const ImmediateEntry& e, const ProcessGraph& g) {
    auto out = elements_of(e.idea);
    if (const auto* icn = g.find(e.icn)) out.insert(icn->te.begin(), icn->te.end());
    return out;
}

// Heaviest immediate entry sharing a lemma with the idea, ties to the oldest.
std::optional<std::size_t> match_target(const ContextState& ctx, const ProcessGraph& g, const IdeaTriple& t,
                                        const Lexicon& lex) {
    auto mine = content_lemmas(t);
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < ctx.immediate.size(); ++i) {
        auto theirs = entry_lemmas(ctx.immediate[i], g);
        bool shares = std::any_of(mine.begin(), mine.end(), [&](const auto& a) {
            return std::any_of(theirs.begin(), theirs.end(), [&](const auto& b) { return lex.equivalent(a, b); });
        });
        if (!shares) continue;
        if (!best || ctx.immediate[i].weight > ctx.immediate[*best].weight) best = i;
    }
    return best;
}

// Active context lemmas contradicted by the synthesized output or goal.
std::set<std::string> contradicted(const SynthesizedMeaning& m, const ContextState& ctx, const ProcessGraph& g,
                                   const Lexicon& lex) {
    std::set<std::string> active;
    for (const auto& [lemma, w] : ctx.activation.activated) active.insert(lemma);
    for (const auto& e : ctx.immediate) {
        auto ls = entry_lemmas(e, g);
        active.insert(ls.begin(), ls.end());
    }
    std::set<std::string> out;
    for (const auto& a : active) {
        for (const auto& x : m.out)
            if (lex.antonyms(a, x)) out.insert(a);
        for (const auto& x : m.goal)
            if (lex.antonyms(a, x)) out.insert(a);
    }
    return out;
}

void rescore_medium(ContextState& ctx, const ConceptActivation& act) {
    for (auto& m : ctx.medium) {
        double s = 0.0;
        for (const auto& l : m.te_lemmas)
            if (auto it = act.activated.find(l); it != act.activated.end()) s += it->second;
        m.score = s;
    }
    std::stable_sort(ctx.medium.begin(), ctx.medium.end(), [](const MediumEntry& a, const MediumEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.icn < b.icn;
    });
}

Json meaning_json(const SynthesizedMeaning& m) {
    return Json{{"out", m.out}, {"goal", m.goal}, {"match_signature", m.match_signature}};
}

Json idea_ref(const IdeaTriple& t) { return Json{{"utterance", t.source_utterance}, {"ordinal", t.ordinal}}; }

bool is_needed_change(MentalImageKind k) {
    return k == MentalImageKind::needed_solution_changes || k == MentalImageKind::needed_problem_changes;
}

// Join back into a cluster untouched for at least `gap` ideas.
bool is_backtrack(const std::vector<IdeaRecord>& h, std::size_t i, int gap) {
    if (h[i].decision != Decision::join) return false;
    for (std::size_t j = i; j-- > 0;)
        if (h[j].icn == h[i].icn) return static_cast<int>(i - j) >= gap;
    return false;
}

bool has_edge(const ProcessGraph& g, IcnId from, IcnId to, EdgeKind kind) {
    return std::any_of(g.edges().begin(), g.edges().end(),
                       [&](const Edge& e) { return e.from == from && e.to == to && e.kind == kind; });
}

// Every element of `narrow` has an equivalent in `wide`, on the same channel,
// and `wide` has more.
bool strictly_subsumed(const ElementSet& narrow, const ElementSet& wide, const Lexicon& lex) {
    if (narrow.empty() || narrow.size() >= wide.size()) return false;
    return std::all_of(narrow.begin(), narrow.end(), [&](const Element& n) {
        return std::any_of(wide.begin(), wide.end(),
                           [&](const Element& w) { return w.channel == n.channel && lex.equivalent(w.lemma, n.lemma); });
    });
}

const std::vector<std::string>& cause_cues() {
    static const std::vector<std::string> cues = {"because", "so that", "therefore", "that's why", "since"};
    return cues;
}

struct IdeaOutcome {
    int iterations = 0;
};

IdeaOutcome process_idea(Snapshot& s, const IdeaTriple& t, const SessionConfig& cfg, const Lexicon& lex,
                         const Emit& emit) {
    auto& ctx = s.context;
    auto& g = s.graph;
    IdeaOutcome outcome;

    auto act = activate_concepts(activation_trigger(t), lex, cfg.context);
    ctx = adjust_work_context(act, std::move(ctx), cfg.context);
    auto rels = activate_relations(t.verb, ctx, lex);
    auto idea_elements = elements_of(t);

    auto rematch = [&](std::optional<std::size_t> target) {
        if (!target) return MatchResult{};
        return match(idea_elements, entry_elements(ctx.immediate[*target], g), lex);
    };
    auto target = match_target(ctx, g, t, lex);
    auto m = rematch(target);
    SynthesizedMeaning meaning{rels.outputs(), rels.goals(), match_signature(m)};
    auto target_icn = [&]() -> Json { return target ? Json(ctx.immediate[*target].icn) : Json(nullptr); };

    Json weights = Json::array();
    for (const auto& e : ctx.immediate) weights.push_back(Json{{"icn", e.icn}, {"weight", e.weight}});
    Json medium = Json::array();
    for (const auto& e : ctx.medium) medium.push_back(Json{{"icn", e.icn}, {"score", e.score}});
    emit(event_kind::context_adjusted, Json{{"idea", idea_ref(t)},
                                            {"activation", ctx.activation},
                                            {"immediate", weights},
                                            {"medium", medium},
                                            {"relations", rels.relations},
                                            {"match_target", target_icn()},
                                            {"meaning", meaning_json(meaning)}});

    // Adjustment loop: only entered when the synthesized meaning contradicts
    // the active context, and left once the match stops changing.
    bool changed = true;
    while (changed && outcome.iterations < cfg.adjustment_cap) {
        auto opposite = contradicted(meaning, ctx, g, lex);
        if (opposite.empty()) break;
        ++outcome.iterations;

        auto holds = [&](const ImmediateEntry& e) {
            auto ls = entry_lemmas(e, g);
            return std::any_of(ls.begin(), ls.end(), [&](const auto& l) { return opposite.count(l) != 0; });
        };
        if (target && holds(ctx.immediate[*target])) {
            ctx.immediate[*target].weight *= cfg.context.decay;
        } else {
            for (auto& e : ctx.immediate)
                if (holds(e)) e.weight *= cfg.context.decay;
        }

        ConceptActivation widened = ctx.activation;
        if (target) {
            for (const auto& l : entry_lemmas(ctx.immediate[*target], g)) {
                auto& w = widened.activated[l];
                w = std::max(w, cfg.context.weight_neighbor);
            }
        }
        rescore_medium(ctx, widened);
        ContextState filter = ctx;
        filter.activation = widened;
        rels = activate_relations(t.verb, filter, lex);

        target = match_target(ctx, g, t, lex);
        m = rematch(target);
        SynthesizedMeaning next{rels.outputs(), rels.goals(), match_signature(m)};
        changed = next.match_signature != meaning.match_signature;
        meaning = std::move(next);
        emit(event_kind::adjustment_iteration, Json{{"idea", idea_ref(t)},
                                                    {"iteration", outcome.iterations},
                                                    {"match_target", target_icn()},
                                                    {"meaning", meaning_json(meaning)},
                                                    {"changed", changed}});
    }

    IdeaFeatures f;
    f.triple = t;
    f.elements = elements_of(t, meaning.out);
    f.goals = meaning.goal;
    f.nature = classify_nature(t, ctx, lex, cfg.nature);
    f.hint = image_hint(t, f.nature, ctx, lex, cfg.nature);

    auto a = assign(f, g, ctx, cfg.icn, lex);
    IdeaRecord rec;
    rec.index = static_cast<int>(s.history.size());
    rec.utterance = t.source_utterance;
    rec.ordinal = t.ordinal;
    rec.decision = a.decision;
    rec.target = a.target;
    rec.score = a.score;
    rec.nature = f.nature;
    rec.hint = f.hint;

    IcnId id = 0;
    if (a.decision == Decision::join) {
        const Icn& before = g.at(a.target);
        rec.te_similarity = similarity(match(f.elements, before.te, lex));
        std::set<std::pair<Channel, std::string>> classes;
        for (const auto& e : before.all_elements()) classes.emplace(e.channel, lex.class_key(e.lemma));
        rec.added_new_element = std::any_of(f.elements.begin(), f.elements.end(), [&](const Element& e) {
            return !classes.count({e.channel, lex.class_key(e.lemma)});
        });
        id = a.target;
        g.put(update_te_ev(before, f, rec.index, lex));
        const auto& icn = g.at(id);
        emit(event_kind::icn_joined, Json{{"icn", id},
                                          {"idea", idea_ref(t)},
                                          {"score", a.score},
                                          {"te_similarity", rec.te_similarity},
                                          {"elements", f.elements},
                                          {"te", icn.te},
                                          {"ev", icn.ev}});
    } else {
        id = g.allocate_id();
        g.put(make_icn(id, f, rec.index, lex));
        const auto& icn = g.at(id);
        emit(event_kind::icn_created, Json{{"icn", id},
                                           {"decision", to_string(a.decision)},
                                           {"target", a.target},
                                           {"score", a.score},
                                           {"idea", idea_ref(t)},
                                           {"elements", f.elements},
                                           {"te", icn.te}});
        if (a.decision == Decision::new_detailing)
            emit(event_kind::edge_added, g.add_edge(a.target, id, EdgeKind::detailing, a.detailed_elements));
        if (a.decision == Decision::new_exploration)
            emit(event_kind::edge_added, g.add_edge(a.target, id, EdgeKind::exploration, {}, a.target));
        if (a.decision == Decision::new_root) {
            for (const auto& [other, o] : g.icns()) {
                if (other == id || has_edge(g, other, id, EdgeKind::generalization)) continue;
                if (strictly_subsumed(icn.te, o.te, lex))
                    emit(event_kind::edge_added, g.add_edge(other, id, EdgeKind::generalization));
            }
        }
    }
    rec.icn = id;

    bool cued_cause = std::any_of(cause_cues().begin(), cause_cues().end(),
                                  [&](const auto& c) { return text::contains_phrase(t.clause, c); });
    if (cued_cause && !s.history.empty()) {
        auto prev = s.history.back().icn;
        if (prev != id && g.find(prev) && !has_edge(g, prev, id, EdgeKind::causality))
            emit(event_kind::edge_added, g.add_edge(prev, id, EdgeKind::causality));
    }
    if (is_needed_change(g.at(id).image)) {
        auto n = s.history.size();
        for (std::size_t back = 1; back <= n && static_cast<int>(back) <= cfg.metrics.resolve_window; ++back) {
            auto k = n - back;
            if (!is_backtrack(s.history, k, cfg.metrics.backtrack_gap)) continue;
            auto from = s.history[k].icn;
            if (from != id && g.find(from) && !has_edge(g, from, id, EdgeKind::causality))
                emit(event_kind::edge_added, g.add_edge(from, id, EdgeKind::causality));
        }
    }

    const auto& icn = g.at(id);
    emit(event_kind::image_tagged, Json{{"icn", id},
                                        {"image", to_string(icn.image)},
                                        {"hint", to_string(f.hint)},
                                        {"nature", to_string(f.nature)},
                                        {"idea", idea_ref(t)}});

    ctx = advance(std::move(ctx), t, id, f.goals, cfg.context);
    sync_medium(ctx, g);
    s.history.push_back(rec);
    return outcome;
}

}  // namespace

Session::Session(SessionConfig cfg, std::shared_ptr<const Lexicon> lex, std::string problem_statement)
    : cfg_(std::move(cfg)), lex_(std::move(lex)), problem_(std::move(problem_statement)),
      state_(std::make_unique<State>()) {
    validate(cfg_);
    if (!lex_) throw ConfigError("session needs a lexicon");
    auto& s = state_->current;
    s.problem_statement = problem_;
    s.context.problem = problem_elements(problem_, *lex_);
    s.top_down = compare_images(problem_image(s.graph, s.context), {}, *lex_, Direction::top_down);
    s.bottom_up = compare_images({}, problem_image(s.graph, s.context), *lex_, Direction::bottom_up);
    s.converged = converged(s.top_down, s.bottom_up, cfg_.eps);
    s.metrics = compute(s.graph, s.context, s.history, *lex_, cfg_.metrics, 0);
    s.last_seq = 1;
    Json opened{{"problem_statement", problem_},
                {"problem", s.context.problem},
                {"config", cfg_}};
    publish({SessionEvent{1, event_kind::session_opened, std::move(opened)}}, std::make_shared<const Snapshot>(s));
}

Session::~Session() { close(); }

void Session::publish(std::vector<SessionEvent> events, std::shared_ptr<const Snapshot> snap) {
    {
        std::lock_guard lock(read_);
        for (auto& e : events) log_.push_back(std::move(e));
        snap_ = std::move(snap);
    }
    appended_.notify_all();
}

EventBatch Session::process(const Utterance& u) {
    std::lock_guard writer(writer_);
    Snapshot next = state_->current;
    EventBatch batch;
    std::int64_t seq = next.last_seq;
    Emit emit = [&](const char* kind, Json payload) {
        batch.events.push_back(SessionEvent{++seq, kind, std::move(payload)});
    };
    auto finish = [&](bool keep_state) {
        if (!keep_state) {
            auto prior = state_->current;
            next = std::move(prior);
        }
        next.last_seq = seq;
        state_->current = next;
        auto snap = std::make_shared<const Snapshot>(next);
        publish(batch.events, std::move(snap));
        return batch;
    };

    if (next.last_utterance && u.id <= *next.last_utterance) {
        batch.status = BatchStatus::stale;
        batch.message = "utterance " + std::to_string(u.id) + " is not after " + std::to_string(*next.last_utterance);
        emit(event_kind::utterance_rejected,
             Json{{"utterance", u}, {"reason", "stale_id"}, {"last_utterance", *next.last_utterance}});
        return finish(false);
    }
    if (next.last_utterance && u.t_ms < next.last_t) {
        batch.status = BatchStatus::invalid;
        batch.message = "utterance " + std::to_string(u.id) + " goes back in time";
        emit(event_kind::utterance_rejected, Json{{"utterance", u}, {"reason", "time_regression"}, {"last_t", next.last_t}});
        return finish(false);
    }

    emit(event_kind::utterance_received, Json{{"utterance", u}});
    std::vector<IdeaTriple> ideas;
    try {
        ideas = extract_ideas(u, *lex_);
        for (const auto& t : ideas)
            if (content_lemmas(t).empty())
                throw ValidationError("utterance " + std::to_string(u.id) + " has an idea with no lemmas");
    } catch (const Error& e) {
        batch.status = BatchStatus::invalid;
        batch.message = e.what();
        emit(event_kind::error, Json{{"utterance", u.id}, {"message", e.what()}});
        return finish(false);
    }

    next.last_utterance = u.id;
    next.last_t = u.t_ms;
    emit(event_kind::ideas_extracted, Json{{"utterance", u.id}, {"ideas", ideas}});
    int most = 0;
    for (const auto& t : ideas) most = std::max(most, process_idea(next, t, cfg_, *lex_, emit).iterations);

    auto problem = problem_image(next.graph, next.context);
    auto solution = solution_image(next.graph, next.context);
    next.top_down = compare_images(problem, solution, *lex_, Direction::top_down);
    next.bottom_up = compare_images(solution, problem, *lex_, Direction::bottom_up);
    next.converged = converged(next.top_down, next.bottom_up, cfg_.eps);
    emit(event_kind::delta_computed,
         Json{{"top_down", next.top_down}, {"bottom_up", next.bottom_up}, {"converged", next.converged}});
    next.metrics = compute(next.graph, next.context, next.history, *lex_, cfg_.metrics, u.id);
    emit(event_kind::metrics_updated, next.metrics);

    {
        std::lock_guard lock(read_);
        ++accepted_;
        max_iterations_ = std::max(max_iterations_, most);
    }
    return finish(true);
}

std::shared_ptr<const Snapshot> Session::snapshot() const {
    std::lock_guard lock(read_);
    return snap_;
}

std::vector<SessionEvent> Session::events_from(std::int64_t from_seq) const {
    std::lock_guard lock(read_);
    std::vector<SessionEvent> out;
    auto start = std::max<std::int64_t>(from_seq, 1);
    for (auto i = static_cast<std::size_t>(start - 1); i < log_.size(); ++i) out.push_back(log_[i]);
    return out;
}

std::int64_t Session::last_seq() const {
    std::lock_guard lock(read_);
    return static_cast<std::int64_t>(log_.size());
}

bool Session::wait_for(std::int64_t from_seq, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(read_);
    appended_.wait_for(lock, timeout,
                       [&] { return closed_ || static_cast<std::int64_t>(log_.size()) >= from_seq; });
    return static_cast<std::int64_t>(log_.size()) >= from_seq;
}

void Session::close() {
    {
        std::lock_guard lock(read_);
        closed_ = true;
    }
    appended_.notify_all();
}

bool Session::closed() const {
    std::lock_guard lock(read_);
    return closed_;
}

int Session::utterance_count() const {
    std::lock_guard lock(read_);
    return accepted_;
}

int Session::max_adjustment_iterations() const {
    std::lock_guard lock(read_);
    return max_iterations_;
}

std::unique_ptr<Session> open_session(const SessionConfig& cfg, std::shared_ptr<const Lexicon> lex,
                                      const std::string& problem_statement) {
    return std::make_unique<Session>(cfg, std::move(lex), problem_statement);
}

std::shared_ptr<const Snapshot> replay(const std::vector<SessionEvent>& log, const SessionConfig& cfg,
                                       std::shared_ptr<const Lexicon> lex) {
    if (log.empty()) return std::make_shared<const Snapshot>();
    for (std::size_t i = 0; i < log.size(); ++i) {
        auto expected = static_cast<std::int64_t>(i + 1);
        if (log[i].seq != expected)
            throw ReplayError("event log is missing seq " + std::to_string(expected) + " (found " +
                              std::to_string(log[i].seq) + ")");
        if (!known_event_kind(log[i].kind)) throw ReplayError("unknown event kind '" + log[i].kind + "'");
    }
    if (log.front().kind != event_kind::session_opened)
        throw ReplayError("event log does not start with " + std::string(event_kind::session_opened));

    std::string problem;
    try {
        problem = log.front().payload.at("problem_statement").get<std::string>();
    } catch (const Json::exception& e) {
        throw ReplayError(std::string("malformed session_opened payload: ") + e.what());
    }
    Session s(cfg, std::move(lex), problem);
    for (const auto& e : log) {
        if (e.kind != event_kind::utterance_received && e.kind != event_kind::utterance_rejected) continue;
        Utterance u;
        try {
            u = e.payload.at("utterance").get<Utterance>();
        } catch (const std::exception& ex) {
            throw ReplayError("seq " + std::to_string(e.seq) + ": malformed utterance: " + ex.what());
        }
        s.process(u);
    }
    return s.snapshot();
}

Transcript read_transcript(std::istream& in, const std::string& source_name) {
    Transcript t;
    std::string line;
    std::size_t n = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        try {
            auto j = Json::parse(line);
            if (first && j.is_object() && j.contains("problem_statement") && !j.contains("id")) {
                t.problem_statement = j.at("problem_statement").get<std::string>();
            } else {
                t.utterances.push_back(j.get<Utterance>());
            }
        } catch (const Json::exception& e) {
            throw ParseError(source_name, n, e.what());
        } catch (const ValidationError& e) {
            throw ParseError(source_name, n, e.what());
        }
        first = false;
    }
    return t;
}

void write_event(std::ostream& out, const SessionEvent& e) { out << canonical(Json(e)) << '\n'; }

std::vector<SessionEvent> read_event_log(std::istream& in, const std::string& source_name) {
    std::vector<SessionEvent> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(Json::parse(line).get<SessionEvent>());
        } catch (const Json::exception& e) {
            throw ParseError(source_name, n, e.what());
        } catch (const ReplayError& e) {
            throw ParseError(source_name, n, e.what());
        }
    }
    return out;
}

}  // namespace teamtrace
