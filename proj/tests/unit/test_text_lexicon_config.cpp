#include "doctest.h"
#include "support.hpp"

#include "teamtrace/config.hpp"
#include "teamtrace/errors.hpp"
#include "teamtrace/text.hpp"

using namespace teamtrace;

TEST_CASE("tokenize keeps hyphenated words and clause punctuation") {
    auto t = text::tokenize("Brute-force, add-up ALL combinations.");
    CHECK(t == std::vector<std::string>{"brute-force", ",", "add-up", "all", "combinations", "."});
    CHECK(text::tokenize("  -dash- 'quote' ") == std::vector<std::string>{"dash", "quote"});
    CHECK(text::tokenize("").empty());
}

TEST_CASE("phrase containment is token aligned") {
    CHECK(text::contains_phrase("Check how many combinations", "check how many"));
    CHECK_FALSE(text::contains_phrase("Checking how many", "check how many"));
    CHECK_FALSE(text::contains_phrase("short", "a longer phrase"));
}

TEST_CASE("split_list trims and drops empty pieces") {
    CHECK(text::split_list(" a | b ||c ", '|') == std::vector<std::string>{"a", "b", "c"});
    CHECK(text::trim("\t x \n") == "x");
}

TEST_CASE("empty lexicon with only headers") {
    auto lex = parse_lexicon("[lemmas]\n[synonyms]\n[antonyms]\n[stopwords]\n[abstraction]\n[verb_relations]\n[image_cues]\n");
    CHECK(lex.lemmas.empty());
    CHECK(lex.synonym_sets.empty());
    CHECK(lex.antonym_pairs.empty());
    CHECK(lex.verb_relations.empty());
    CHECK(lex.abstraction_rank.empty());
}

TEST_CASE("golden lexicon content") {
    const auto& lex = *tt_test::golden().lex;
    bool found = false;
    for (const auto& s : lex.synonym_sets) found = found || s == std::set<std::string>{"add", "add-up", "sum"};
    CHECK(found);
    CHECK(lex.antonyms("gap", "contiguous"));
    CHECK(lex.antonyms("contiguous", "gap"));
    CHECK(lex.equivalent("add", "sum"));
    CHECK_FALSE(lex.equivalent("add", "shift"));
    CHECK(lex.class_key("sum") == "add");
    CHECK(lex.lemma_of("Numbers") == "numbers");
    CHECK(lex.lemma_of("add up") == "add");
    CHECK(lex.rank("length") == 2);
    CHECK_FALSE(lex.rank("unheard").has_value());
    CHECK(lex.relations("nonverb").empty());
    CHECK_NOTHROW(validate(lex));
}

TEST_CASE("lexicon validation") {
    Lexicon hand;
    hand.synonym_sets = {{"a", "b"}, {"b", "c"}};
    hand.reindex();
    CHECK_THROWS_AS(validate(hand), ValidationError);
    SUBCASE("lemma in two synonym sets") {
        CHECK_THROWS_AS(parse_lexicon("[synonyms]\na, b\nb, c\n"), ValidationError);
    }
    SUBCASE("synonym that is also an antonym") {
        CHECK_THROWS_AS(parse_lexicon("[synonyms]\na, b\n[antonyms]\na, b\n"), ValidationError);
    }
    SUBCASE("relation lemma without a rank") {
        CHECK_THROWS_AS(parse_lexicon("[abstraction]\nrun = 1\n[verb_relations]\nrun = object: laps\n"), ValidationError);
    }
}

TEST_CASE("lexicon parse errors carry the line") {
    try {
        parse_lexicon("[lemmas]\nok = ok\nbroken line\n", "bad.lex");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.source() == "bad.lex");
    }
    CHECK_THROWS_AS(parse_lexicon("[nowhere]\n"), ParseError);
    CHECK_THROWS_AS(parse_lexicon("a = b\n"), ParseError);
    CHECK_THROWS_AS(parse_lexicon("[abstraction]\nx = high\n"), ParseError);
    CHECK_THROWS_AS(parse_lexicon("[image_cues]\nx = dream\n"), ParseError);
    CHECK_THROWS_AS(load_lexicon("/nonexistent/file.lex"), ParseError);
}

TEST_CASE("shipped config equals the defaults") {
    auto cfg = load_config(tt_test::data_dir() / "default.cfg");
    CHECK(cfg == SessionConfig{});
    CHECK(cfg.context.window == 5);
    CHECK(cfg.context.decay == doctest::Approx(0.7));
    CHECK(cfg.icn.theta_join == doctest::Approx(0.5));
    CHECK(cfg.icn.theta_detail == doctest::Approx(0.3));
    CHECK(cfg.icn.candidates == 8);
    CHECK(cfg.adjustment_cap == 3);
}

TEST_CASE("config values and errors") {
    auto cfg = parse_config("[icn]\ntheta_join = 0.6\n[session]\neps = 2\n");
    CHECK(cfg.icn.theta_join == doctest::Approx(0.6));
    CHECK(cfg.eps == 2);
    CHECK_THROWS_AS(parse_config("[session]\nadjustment_cap = 0\n"), Error);
    CHECK_THROWS_AS(parse_config("[icn]\ntheta_join = lots\n"), Error);
    CHECK_THROWS_AS(parse_config("[icn]\nbogus = 1\n"), Error);
    try {
        parse_config("[icn]\n\ntheta_join 0.6\n", "x.cfg");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    SessionConfig bad;
    bad.adjustment_cap = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = {};
    bad.icn.theta_join = 1.5;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("config entries round-trip through apply_setting") {
    SessionConfig cfg;
    cfg.context.window = 7;
    cfg.metrics.backtrack_gap = 4;
    SessionConfig copy;
    for (const auto& [k, v] : config_entries(cfg)) apply_setting(copy, k, v);
    CHECK(copy == cfg);
}
