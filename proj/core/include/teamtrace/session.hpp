#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "teamtrace/config.hpp"
#include "teamtrace/context.hpp"
#include "teamtrace/graph.hpp"
#include "teamtrace/lexicon.hpp"
#include "teamtrace/metrics.hpp"
#include "teamtrace/serialize.hpp"

namespace teamtrace {

// Event kinds, in pipeline order within one utterance group.
namespace event_kind {
inline constexpr const char* session_opened = "session_opened";
inline constexpr const char* utterance_received = "utterance_received";
inline constexpr const char* utterance_rejected = "utterance_rejected";
inline constexpr const char* ideas_extracted = "ideas_extracted";
inline constexpr const char* context_adjusted = "context_adjusted";
inline constexpr const char* adjustment_iteration = "adjustment_iteration";
inline constexpr const char* icn_created = "icn_created";
inline constexpr const char* icn_joined = "icn_joined";
inline constexpr const char* edge_added = "edge_added";
inline constexpr const char* image_tagged = "image_tagged";
inline constexpr const char* delta_computed = "delta_computed";
inline constexpr const char* metrics_updated = "metrics_updated";
inline constexpr const char* error = "error";
}  // namespace event_kind

bool known_event_kind(const std::string& kind);

struct SessionEvent {
    std::int64_t seq = 0;
    std::string kind;
    Json payload;

    bool operator==(const SessionEvent&) const = default;
};

void to_json(Json& j, const SessionEvent& e);
void from_json(const Json& j, SessionEvent& e);

enum class BatchStatus { accepted, stale, invalid };

struct EventBatch {
    std::vector<SessionEvent> events;
    BatchStatus status = BatchStatus::accepted;
    std::string message;
};

// Expected output and goal synthesized for one idea, with a fingerprint of the
// matched pairs that produced them.
struct SynthesizedMeaning {
    std::set<std::string> out;
    std::set<std::string> goal;
    std::string match_signature;

    bool operator==(const SynthesizedMeaning&) const = default;
};

// FNV-1a over the canonical form of the matched pairs, as 16 hex digits.
std::string match_signature(const MatchResult& m);

struct Snapshot {
    ProcessGraph graph;
    ContextState context;
    MetricsReport metrics;
    std::vector<IdeaRecord> history;
    ImageDelta top_down;
    ImageDelta bottom_up{{}, DeltaMeaning::none, Direction::bottom_up};
    bool converged = true;
    std::string problem_statement;
    std::int64_t last_seq = 0;
    std::optional<UtteranceId> last_utterance;
    std::int64_t last_t = 0;

    bool operator==(const Snapshot&) const = default;
};

void to_json(Json& j, const Snapshot& s);
void from_json(const Json& j, Snapshot& s);

// Non-verb lemmas of the statement's extracted ideas.
ElementSet problem_elements(const std::string& statement, const Lexicon& lex);

// One discussion: a single writer appends utterances, any number of readers
// take snapshots or follow the event log.
class Session {
public:
    // Throws ConfigError for an invalid config.
    Session(SessionConfig cfg, std::shared_ptr<const Lexicon> lex, std::string problem_statement);

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;
    ~Session();

    // Runs the full pipeline and appends the resulting events atomically.
    // Stale or invalid utterances produce a rejection or error group instead.
    EventBatch process(const Utterance& u);

    std::shared_ptr<const Snapshot> snapshot() const;

    // Events with seq >= from_seq, in order.
    std::vector<SessionEvent> events_from(std::int64_t from_seq) const;
    std::int64_t last_seq() const;

    // Waits until an event with seq >= from_seq exists, the timeout elapses,
    // or the session is closed. Returns true when such an event exists.
    bool wait_for(std::int64_t from_seq, std::chrono::milliseconds timeout) const;
    void close();
    bool closed() const;

    const SessionConfig& config() const noexcept { return cfg_; }
    const Lexicon& lexicon() const noexcept { return *lex_; }
    std::shared_ptr<const Lexicon> shared_lexicon() const noexcept { return lex_; }
    const std::string& problem_statement() const noexcept { return problem_; }
    int utterance_count() const;

    // Highest adjustment iteration count any idea reached so far.
    int max_adjustment_iterations() const;

private:
    struct State;

    void publish(std::vector<SessionEvent> events, std::shared_ptr<const Snapshot> snap);

    SessionConfig cfg_;
    std::shared_ptr<const Lexicon> lex_;
    std::string problem_;

    std::mutex writer_;            // serializes process()
    std::unique_ptr<State> state_; // owned by the writer

    mutable std::mutex read_;      // guards log_, snap_, closed_
    mutable std::condition_variable appended_;
    std::vector<SessionEvent> log_;
    std::shared_ptr<const Snapshot> snap_;
    bool closed_ = false;
    int accepted_ = 0;
    int max_iterations_ = 0;
};

std::unique_ptr<Session> open_session(const SessionConfig& cfg, std::shared_ptr<const Lexicon> lex,
                                      const std::string& problem_statement);

// Rebuilds the session by re-running every logged utterance. Throws
// ReplayError on a seq gap, an unknown kind, or a malformed payload.
std::shared_ptr<const Snapshot> replay(const std::vector<SessionEvent>& log, const SessionConfig& cfg,
                                       std::shared_ptr<const Lexicon> lex);

// JSON lines: an optional {"problem_statement": ...} header, then one
// utterance object per line. Blank lines are skipped.
struct Transcript {
    std::string problem_statement;
    std::vector<Utterance> utterances;
};

Transcript read_transcript(std::istream& in, const std::string& source_name = "<transcript>");

// JSON lines, one canonical event per line.
void write_event(std::ostream& out, const SessionEvent& e);
std::vector<SessionEvent> read_event_log(std::istream& in, const std::string& source_name = "<events>");

}  // namespace teamtrace
