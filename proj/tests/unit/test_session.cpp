#include "doctest.h"
#include "support.hpp"

#include <atomic>
#include <sstream>
#include <thread>

#include "teamtrace/errors.hpp"

using namespace teamtrace;
using tt_test::golden;

namespace {

std::vector<std::string> kinds(const std::vector<SessionEvent>& events) {
    std::vector<std::string> out;
    for (const auto& e : events) out.push_back(e.kind);
    return out;
}

Utterance annotated(UtteranceId id, std::int64_t t, IdeaTriple triple) {
    Utterance u;
    u.id = id;
    u.t_ms = t;
    u.text = "annotated";
    u.pre_annotation = std::vector<IdeaTriple>{std::move(triple)};
    return u;
}

IdeaTriple triple(std::string verb, std::vector<std::string> noun2, std::vector<std::string> mods = {}) {
    IdeaTriple t;
    t.verb = std::move(verb);
    t.noun2 = std::move(noun2);
    t.modifiers = std::move(mods);
    return t;
}

// Two equally weighted recent ideas both hold "slow", the antonym of the
// output synthesized for "sprint"; each demotion flips the match target.
std::shared_ptr<const Lexicon> oscillation_lexicon() {
    return std::make_shared<const Lexicon>(parse_lexicon(R"([antonyms]
slow, fast
[abstraction]
sprint = 1
jog = 1
walk = 1
track = 1
road = 1
fast = 1
slow = 1
[verb_relations]
sprint = object: track|road ; output: fast
)"));
}

std::vector<SessionEvent> oscillate(int cap) {
    SessionConfig cfg;
    cfg.adjustment_cap = cap;
    auto s = open_session(cfg, oscillation_lexicon(), "");
    s->process(annotated(1, 0, triple("jog", {"track"}, {"slow"})));
    s->process(annotated(2, 1, triple("walk", {"road"}, {"slow"})));
    auto batch = s->process(annotated(3, 2, triple("sprint", {"track", "road"})));
    CHECK(s->max_adjustment_iterations() == cap);
    return batch.events;
}

}  // namespace

TEST_CASE("fresh session") {
    const auto& g = golden();
    auto s = open_session(g.cfg, g.lex, g.transcript.problem_statement);
    auto snap = s->snapshot();
    CHECK(snap->graph.empty());
    CHECK(snap->history.empty());
    CHECK(snap->metrics.exploration.alternative_count == 0);
    CHECK(snap->metrics.fulfilled_requirements.count == 0);
    CHECK(snap->last_seq == 1);
    CHECK(lemmas_of(snap->context.problem) ==
          std::set<std::string>{"contiguous", "maximum", "numbers", "subsequence", "sum"});
    CHECK(kinds(s->events_from(1)) == std::vector<std::string>{event_kind::session_opened});

    auto empty = open_session(g.cfg, g.lex, "");
    CHECK(empty->snapshot()->context.problem.empty());
    CHECK(empty->snapshot()->metrics.unconsidered_needs.count == 0);
}

TEST_CASE("invalid config is rejected") {
    SessionConfig cfg;
    cfg.adjustment_cap = 0;
    CHECK_THROWS_AS(open_session(cfg, golden().lex, ""), ConfigError);
}

TEST_CASE("first golden utterance") {
    const auto& g = golden();
    auto s = open_session(g.cfg, g.lex, g.transcript.problem_statement);
    auto batch = s->process(g.transcript.utterances[0]);
    CHECK(batch.status == BatchStatus::accepted);
    CHECK(kinds(batch.events) == std::vector<std::string>{event_kind::utterance_received, event_kind::ideas_extracted,
                                                          event_kind::context_adjusted, event_kind::icn_created,
                                                          event_kind::image_tagged, event_kind::delta_computed,
                                                          event_kind::metrics_updated});
    CHECK(batch.events[3].payload.at("decision") == "new_root");
    CHECK(batch.events[4].payload.at("image") == "desired_solution");
    CHECK(batch.events.front().seq == 2);
    CHECK(s->last_seq() == 8);
}

TEST_CASE("I_6 opens a detailing ICN over entire length") {
    const auto& g = golden();
    auto s = open_session(g.cfg, g.lex, g.transcript.problem_statement);
    for (int i = 0; i < 5; ++i) s->process(g.transcript.utterances[i]);
    auto batch = s->process(g.transcript.utterances[5]);
    const SessionEvent* created = nullptr;
    const SessionEvent* edge = nullptr;
    for (const auto& e : batch.events) {
        if (e.kind == event_kind::icn_created) created = &e;
        if (e.kind == event_kind::edge_added) edge = &e;
    }
    REQUIRE(created);
    REQUIRE(edge);
    CHECK(created->payload.at("decision") == "new_detailing");
    CHECK(edge->payload.at("kind") == "detailing");
    auto payload = edge->payload.at("payload").get<ElementSet>();
    CHECK(lemmas_of(payload) == std::set<std::string>{"entire", "length"});
}

TEST_CASE("adjustment loop stops at the cap") {
    for (int cap : {1, 3, 5}) {
        auto events = oscillate(cap);
        std::vector<Json> targets;
        for (const auto& e : events)
            if (e.kind == event_kind::adjustment_iteration) {
                targets.push_back(e.payload.at("match_target"));
                CHECK(e.payload.at("changed") == true);
            }
        CHECK(static_cast<int>(targets.size()) == cap);
        for (std::size_t i = 1; i < targets.size(); ++i) CHECK(targets[i] != targets[i - 1]);
    }
}

TEST_CASE("quiet context never enters the loop") {
    const auto& g = golden();
    auto s = tt_test::run(g.transcript, g.lex, g.cfg);
    for (const auto& e : s->events_from(1)) CHECK(e.kind != event_kind::adjustment_iteration);
    CHECK(s->max_adjustment_iterations() == 0);
}

TEST_CASE("stale and regressing utterances are rejected") {
    const auto& g = golden();
    auto s = open_session(g.cfg, g.lex, g.transcript.problem_statement);
    s->process(g.transcript.utterances[0]);
    s->process(g.transcript.utterances[1]);
    auto before = s->snapshot();

    auto stale = s->process(g.transcript.utterances[0]);
    CHECK(stale.status == BatchStatus::stale);
    REQUIRE(stale.events.size() == 1);
    CHECK(stale.events[0].kind == event_kind::utterance_rejected);
    CHECK(stale.events[0].payload.at("reason") == "stale_id");

    auto late = g.transcript.utterances[2];
    late.t_ms = 0;
    auto regress = s->process(late);
    CHECK(regress.status == BatchStatus::invalid);
    CHECK(regress.events[0].payload.at("reason") == "time_regression");

    auto after = s->snapshot();
    CHECK(after->graph == before->graph);
    CHECK(after->history == before->history);
    CHECK(after->last_seq == before->last_seq + 2);
    CHECK(s->utterance_count() == 2);
}

TEST_CASE("utterance without ideas is an error") {
    const auto& g = golden();
    auto s = open_session(g.cfg, g.lex, "");
    Utterance u;
    u.id = 1;
    u.text = "   ";
    auto batch = s->process(u);
    CHECK(batch.status == BatchStatus::invalid);
    CHECK(kinds(batch.events) == std::vector<std::string>{event_kind::utterance_received, event_kind::error});
    CHECK(s->snapshot()->graph.empty());
    // the id stays usable
    u.text = "Check length";
    CHECK(s->process(u).status == BatchStatus::accepted);
}

TEST_CASE("snapshots are stable views") {
    const auto& g = golden();
    auto s = open_session(g.cfg, g.lex, g.transcript.problem_statement);
    for (int i = 0; i < 4; ++i) s->process(g.transcript.utterances[i]);
    auto a = s->snapshot();
    auto b = s->snapshot();
    CHECK(canonical(Json(*a)) == canonical(Json(*b)));
    s->process(g.transcript.utterances[4]);
    CHECK(a->history.size() == 4);
    CHECK(s->snapshot()->history.size() == 5);
}

TEST_CASE("golden run equals the shipped snapshot and log") {
    const auto& g = golden();
    auto s = tt_test::run(g.transcript, g.lex, g.cfg);
    auto snap_text = tt_test::read_file(tt_test::data_dir() / "golden" / "snapshot.json");
    CHECK(canonical(Json(*s->snapshot())) == canonical(Json::parse(snap_text)));
    std::ostringstream log;
    for (const auto& e : s->events_from(1)) write_event(log, e);
    CHECK(log.str() == tt_test::read_file(tt_test::data_dir() / "golden" / "events.jsonl"));
    auto parsed = Json::parse(snap_text).get<Snapshot>();
    CHECK(parsed == *s->snapshot());
}

TEST_CASE("replay") {
    const auto& g = golden();
    auto s = tt_test::run(g.transcript, g.lex, g.cfg);
    auto log = s->events_from(1);
    CHECK(canonical(Json(*replay(log, g.cfg, g.lex))) == canonical(Json(*s->snapshot())));

    CHECK(*replay({}, g.cfg, g.lex) == Snapshot{});

    auto gap = log;
    gap.erase(gap.begin() + 10);
    CHECK_THROWS_AS(replay(gap, g.cfg, g.lex), ReplayError);

    auto unknown = log;
    unknown[3].kind = "telepathy";
    CHECK_THROWS_AS(replay(unknown, g.cfg, g.lex), ReplayError);

    auto headless = log;
    headless.erase(headless.begin());
    for (auto& e : headless) --e.seq;
    CHECK_THROWS_AS(replay(headless, g.cfg, g.lex), ReplayError);

    std::stringstream io;
    for (const auto& e : log) write_event(io, e);
    CHECK(read_event_log(io) == log);
    std::istringstream broken("{\"seq\": 1, \"kind\": \"session_opened\", \"payload\": {}}\nnot json\n");
    CHECK_THROWS_AS(read_event_log(broken), Error);
}

TEST_CASE("transcript reading") {
    std::istringstream in(R"({"problem_statement": "Sort the rows"}

{"id": 1, "session": "s", "speaker": "a", "t": 5, "text": "Bubble sort"}
)");
    auto t = read_transcript(in);
    CHECK(t.problem_statement == "Sort the rows");
    REQUIRE(t.utterances.size() == 1);
    CHECK(t.utterances[0].t_ms == 5);
    CHECK_FALSE(t.utterances[0].pre_annotation.has_value());

    std::istringstream bad("{\"id\": 1, \"text\": \"a\"}\n{oops\n");
    try {
        read_transcript(bad, "bad.jsonl");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream empty("");
    CHECK(read_transcript(empty).utterances.empty());
}

TEST_CASE("readers see whole utterance groups while a writer runs") {
    const auto& g = golden();
    auto s = open_session(g.cfg, g.lex, g.transcript.problem_statement);
    std::atomic<bool> done{false};
    std::atomic<int> torn{0};
    std::thread reader([&] {
        while (!done) {
            auto snap = s->snapshot();
            auto log = s->events_from(1);
            if (!log.empty() && log.back().kind != event_kind::metrics_updated &&
                log.back().kind != event_kind::session_opened)
                ++torn;
            if (snap->metrics.at_utterance != snap->last_utterance.value_or(0)) ++torn;
        }
    });
    std::thread follower([&] {
        std::int64_t next = 1;
        while (next <= 140) {
            if (!s->wait_for(next, std::chrono::milliseconds(2000))) break;
            auto got = s->events_from(next);
            for (const auto& e : got) {
                if (e.seq != next) ++torn;
                ++next;
            }
        }
    });
    for (const auto& u : g.transcript.utterances) s->process(u);
    follower.join();
    done = true;
    reader.join();
    CHECK(torn == 0);
    CHECK(s->last_seq() == 140);
    s->close();
    CHECK(s->closed());
    CHECK_FALSE(s->wait_for(500, std::chrono::milliseconds(10)));
}
