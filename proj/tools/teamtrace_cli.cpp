#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "teamtrace/errors.hpp"
#include "teamtrace/service.hpp"
#include "teamtrace/session.hpp"

namespace fs = std::filesystem;
using namespace teamtrace;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kInvariant = 3 };

std::ifstream open_input(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open " + p.string());
    return in;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
}

SessionConfig config_or_default(const std::string& path) {
    return path.empty() ? SessionConfig{} : load_config(path);
}

std::string summary(const Snapshot& s, int rejected) {
    std::ostringstream out;
    const auto& g = s.graph;
    std::map<EdgeKind, int> by_kind;
    for (const auto& e : g.edges()) ++by_kind[e.kind];
    out << "ideas: " << s.history.size() << "\n";
    out << "rejected utterances: " << rejected << "\n";
    out << "icns: " << g.icns().size() << "\n";
    out << "edges:";
    for (auto k : {EdgeKind::detailing, EdgeKind::exploration, EdgeKind::causality, EdgeKind::generalization})
        out << " " << to_string(k) << "=" << by_kind[k];
    out << "\n\n";
    for (const auto& [id, icn] : g.icns()) {
        out << "ICN#" << id << " [" << to_string(icn.image) << "] members:";
        for (const auto& m : icn.members) out << " u" << m.utterance << "." << m.ordinal;
        out << " te:";
        for (const auto& e : icn.te) out << " " << e.lemma;
        out << "\n";
    }
    for (const auto& e : g.edges()) {
        out << "  " << e.from << " -> " << e.to << " " << to_string(e.kind);
        if (!e.payload.empty()) {
            out << " {";
            bool first = true;
            for (const auto& p : e.payload) {
                out << (first ? "" : ", ") << p.lemma;
                first = false;
            }
            out << "}";
        }
        out << "\n";
    }
    const auto& m = s.metrics;
    out << "\nfulfilled requirements: " << m.fulfilled_requirements.count << " (ratio "
        << m.fulfilled_requirements.ratio << ")\n";
    out << "exploration: " << m.exploration.alternative_count << " alternatives, " << m.exploration.switch_count
        << " switches\n";
    out << "substantiated decisions: ratio " << m.substantiated_decisions.ratio << ", "
        << m.substantiated_decisions.orphan_count << " orphans\n";
    out << "backtracking: " << m.backtracking.count << " (" << m.backtracking.resolved_count << " resolved)\n";
    out << "contradictions: " << m.contradictions.count << "\n";
    out << "repetitions: " << m.repetitions.count << " (" << m.repetitions.productive_count << " productive)\n";
    out << "unconsidered needs: " << m.unconsidered_needs.count << "\n";
    out << "unexplored items: " << m.unexplored_items.count << "\n";
    out << "converged: " << (s.converged ? "yes" : "no") << " (top-down " << s.top_down.delta.size()
        << ", bottom-up " << s.bottom_up.delta.size() << ")\n";
    return out.str();
}

int analyze(const std::string& transcript_path, const std::string& lexicon_path, const std::string& config_path,
            const std::string& problem, const std::string& out_dir) {
    auto lex = std::make_shared<const Lexicon>(load_lexicon(lexicon_path));
    auto cfg = config_or_default(config_path);
    auto in = open_input(transcript_path);
    auto transcript = read_transcript(in, transcript_path);
    if (!problem.empty()) transcript.problem_statement = problem;

    Session session(cfg, lex, transcript.problem_statement);
    int rejected = 0;
    for (const auto& u : transcript.utterances) {
        auto batch = session.process(u);
        if (batch.status != BatchStatus::accepted) {
            ++rejected;
            std::cerr << "warning: " << batch.message << "\n";
        }
    }
    auto snap = session.snapshot();
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "snapshot.json", canonical(Json(*snap)) + "\n");
    write_file(fs::path(out_dir) / "metrics.json", canonical(Json(snap->metrics)) + "\n");
    write_file(fs::path(out_dir) / "summary.txt", summary(*snap, rejected));
    std::ofstream events(fs::path(out_dir) / "events.jsonl", std::ios::binary);
    for (const auto& e : session.events_from(1)) write_event(events, e);
    return kOk;
}

int replay_log(const std::string& events_path, const std::string& lexicon_path, const std::string& config_path,
               std::int64_t from_seq) {
    auto lex = std::make_shared<const Lexicon>(load_lexicon(lexicon_path));
    auto cfg = config_or_default(config_path);
    auto in = open_input(events_path);
    auto log = read_event_log(in, events_path);
    auto snap = replay(log, cfg, lex);
    if (from_seq > 0) {
        for (const auto& e : log)
            if (e.seq >= from_seq) write_event(std::cout, e);
        return kOk;
    }
    std::cout << canonical(Json(*snap)) << "\n";
    return kOk;
}

int export_snapshot(const std::string& path, const std::string& format) {
    auto in = open_input(path);
    std::stringstream buf;
    buf << in.rdbuf();
    Snapshot snap;
    try {
        snap = Json::parse(buf.str()).get<Snapshot>();
    } catch (const Json::exception& e) {
        throw ParseError(path, 1, e.what());
    }
    if (format == "dot") std::cout << to_dot(snap.graph);
    else std::cout << canonical(Json(snap)) << "\n";
    return kOk;
}

int validate_lexicon(const std::string& path) {
    auto lex = load_lexicon(path);
    std::cout << path << ": ok (" << lex.known_lemmas().size() << " lemmas, " << lex.synonym_sets.size()
              << " synonym sets, " << lex.antonym_pairs.size() / 2 << " antonym pairs, " << lex.verb_relations.size()
              << " verbs)\n";
    return kOk;
}

int serve(const std::string& host, int port, const std::string& lexicon_dir, const std::string& config_path) {
    ServiceOptions opts;
    opts.lexicon_dir = lexicon_dir;
    opts.base_config = config_or_default(config_path);
    Service service(opts);
    int bound = service.bind(host, port);
    if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    std::cerr << "listening on " << host << ":" << bound << "\n";
    return service.listen_after_bind() ? kOk : kInput;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Idea cluster graph and team metrics from discussion transcripts"};
    app.require_subcommand(1, 1);

    std::string transcript, lexicon, config, out_dir = "out", format = "json", problem, events, snapshot;
    std::string lexicon_dir = ".", host = "127.0.0.1";
    std::int64_t from_seq = 0;
    int port = 8080;

    auto* analyze_cmd = app.add_subcommand("analyze", "Run a transcript through the pipeline");
    analyze_cmd->add_option("--transcript", transcript, "Transcript (JSON lines)")->required();
    analyze_cmd->add_option("--lexicon", lexicon, "Lexicon file")->required();
    analyze_cmd->add_option("--config", config, "Config file")->envname("ICN_CONFIG");
    analyze_cmd->add_option("--problem", problem, "Problem statement, overriding the transcript header");
    analyze_cmd->add_option("--out-dir", out_dir, "Output directory");

    auto* replay_cmd = app.add_subcommand("replay", "Rebuild the snapshot from an event log");
    replay_cmd->add_option("--events", events, "Event log (JSON lines)")->required();
    replay_cmd->add_option("--lexicon", lexicon, "Lexicon file")->required();
    replay_cmd->add_option("--config", config, "Config file")->envname("ICN_CONFIG");
    replay_cmd->add_option("--from-seq", from_seq, "Print the log from this seq instead of the snapshot")
        ->check(CLI::NonNegativeNumber);

    auto* export_cmd = app.add_subcommand("export", "Render a snapshot");
    export_cmd->add_option("--snapshot", snapshot, "Snapshot JSON")->required();
    export_cmd->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}));

    auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP service");
    serve_cmd->add_option("--port", port, "Port (0 picks one)")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--lexicon-dir", lexicon_dir, "Directory of <name>.lex files")->check(CLI::ExistingDirectory);
    serve_cmd->add_option("--config", config, "Base config file")->envname("ICN_CONFIG");

    auto* validate_cmd = app.add_subcommand("validate-lexicon", "Check a lexicon file");
    validate_cmd->add_option("--lexicon", lexicon, "Lexicon file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*analyze_cmd) return analyze(transcript, lexicon, config, problem, out_dir);
        if (*replay_cmd) return replay_log(events, lexicon, config, from_seq);
        if (*export_cmd) return export_snapshot(snapshot, format);
        if (*serve_cmd) return serve(host, port, lexicon_dir, config);
        if (*validate_cmd) return validate_lexicon(lexicon);
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    }
    return kUsage;
}
