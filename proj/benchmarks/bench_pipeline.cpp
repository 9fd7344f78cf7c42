#include <benchmark/benchmark.h>

#include <fstream>

#include "teamtrace/session.hpp"

using namespace teamtrace;

namespace {

struct Golden {
    std::shared_ptr<const Lexicon> lex;
    Transcript transcript;
};

const Golden& golden() {
    static const Golden g = [] {
        Golden out;
        std::filesystem::path dir = TEAMTRACE_DATA_DIR;
        out.lex = std::make_shared<const Lexicon>(load_lexicon(dir / "case_study.lex"));
        std::ifstream in(dir / "case_study.transcript.jsonl");
        out.transcript = read_transcript(in);
        return out;
    }();
    return g;
}

// Golden utterances repeated with fresh ids and text-only input.
std::vector<Utterance> stretched(int copies, bool annotated) {
    std::vector<Utterance> out;
    UtteranceId id = 0;
    for (int c = 0; c < copies; ++c)
        for (auto u : golden().transcript.utterances) {
            u.id = ++id;
            u.t_ms = id * 1000;
            if (!annotated) u.pre_annotation.reset();
            out.push_back(std::move(u));
        }
    return out;
}

void BM_GoldenSession(benchmark::State& state) {
    const auto& g = golden();
    for (auto _ : state) {
        auto s = open_session(SessionConfig{}, g.lex, g.transcript.problem_statement);
        for (const auto& u : g.transcript.utterances) s->process(u);
        benchmark::DoNotOptimize(s->last_seq());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.transcript.utterances.size()));
}
BENCHMARK(BM_GoldenSession)->Unit(benchmark::kMillisecond);

void BM_LongSession(benchmark::State& state) {
    auto us = stretched(static_cast<int>(state.range(0)), state.range(1) != 0);
    for (auto _ : state) {
        auto s = open_session(SessionConfig{}, golden().lex, golden().transcript.problem_statement);
        for (const auto& u : us) s->process(u);
        benchmark::DoNotOptimize(s->last_seq());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(us.size()));
}
BENCHMARK(BM_LongSession)->Args({5, 1})->Args({20, 1})->Args({5, 0})->Unit(benchmark::kMillisecond);

void BM_Replay(benchmark::State& state) {
    const auto& g = golden();
    auto s = open_session(SessionConfig{}, g.lex, g.transcript.problem_statement);
    for (const auto& u : g.transcript.utterances) s->process(u);
    auto log = s->events_from(1);
    for (auto _ : state) benchmark::DoNotOptimize(replay(log, SessionConfig{}, g.lex));
}
BENCHMARK(BM_Replay)->Unit(benchmark::kMillisecond);

void BM_SnapshotJson(benchmark::State& state) {
    const auto& g = golden();
    auto s = open_session(SessionConfig{}, g.lex, g.transcript.problem_statement);
    for (const auto& u : g.transcript.utterances) s->process(u);
    auto snap = s->snapshot();
    for (auto _ : state) benchmark::DoNotOptimize(canonical(Json(*snap)));
}
BENCHMARK(BM_SnapshotJson);

}  // namespace

BENCHMARK_MAIN();
