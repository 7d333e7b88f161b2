#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "streamst/errors.hpp"
#include "streamst/metrics.hpp"
#include "streamst/policy.hpp"
#include "support/test_fixtures.hpp"

using namespace streamst;
using namespace streamst::metrics;

namespace {

EmissionLog log_of(std::vector<std::int64_t> delays, std::int64_t duration) {
    EmissionLog log;
    log.source_duration_ms = duration;
    int i = 0;
    for (const auto d : delays) log.items.push_back({"w" + std::to_string(++i), d});
    return log;
}

}  // namespace

TEST_CASE("average lagging basics") {
    // uniform one-word-per-chunk schedule with lag k behaves like k chunks
    const auto log = log_of({1000, 1500, 2000, 2500, 3000, 3000}, 3000);
    const auto r = average_lagging(log);
    CHECK(r.al_ms == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(r.tau == 5);  // the 3000 ms emission reaches T
    CHECK(r.gamma == doctest::Approx(6.0 / 3000.0));

    SUBCASE("LAAL uses the longer of hypothesis and reference") {
        // a longer reference flattens the ideal schedule, so LAAL grows
        const auto longer_ref = average_lagging(log, 12);
        CHECK(longer_ref.al_ms == r.al_ms);
        CHECK(longer_ref.laal_ms == doctest::Approx(1500.0).epsilon(1e-12));
        const auto shorter_ref = average_lagging(log, 3);
        CHECK(shorter_ref.laal_ms == r.laal_ms);  // max(6, 3) = 6
    }
    SUBCASE("tau = 1 offline case gives AL = T") {
        const auto offline = average_lagging(log_of({3000, 3000, 3000}, 3000));
        CHECK(offline.tau == 1);
        CHECK(offline.al_ms == 3000.0);
    }
    SUBCASE("negative delays from resegmentation are averaged, not clamped") {
        const auto r2 = average_lagging(log_of({-200, 400}, 800));
        CHECK(r2.al_ms == doctest::Approx((-200.0 + 0.0) / 2.0));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(average_lagging(log_of({}, 1000)), MetricError);
        CHECK_THROWS_AS(average_lagging(log_of({10}, 0)), MetricError);
    }
}

TEST_CASE("corpus bleu") {
    SUBCASE("identity scores 100 at any length") {
        CHECK(corpus_bleu({"the cat sat on the mat"}, {"the cat sat on the mat"}) ==
              doctest::Approx(100.0));
        CHECK(corpus_bleu({"two words"}, {"two words"}) == doctest::Approx(100.0));
    }
    SUBCASE("zero n-gram overlap scores 0") {
        CHECK(corpus_bleu({"aa bb cc dd"}, {"ee ff gg hh"}) == 0.0);
    }
    SUBCASE("hand-computed values") {
        // one substitution at the tail, equal lengths
        CHECK(corpus_bleu({"the cat sat on the mat"}, {"the cat sat on the hat"}) ==
              doctest::Approx(75.98356856515926).epsilon(1e-9));
        // pooled two-segment corpus: every n-gram matches, so the score is
        // purely the brevity penalty exp(1 - 9/7)
        CHECK(corpus_bleu({"the cat sat", "on a big mat"},
                          {"the cat sat down", "on a big mat now"}) ==
              doctest::Approx(75.14772930752859).epsilon(1e-9));
        // punctuation splits into tokens before matching
        CHECK(corpus_bleu({"the big cat sat on the mat."}, {"the big cat sat on a mat."}) ==
              doctest::Approx(59.46035575013605).epsilon(1e-9));
    }
    SUBCASE("character tokenization") {
        CHECK(corpus_bleu({"abcd"}, {"abcd"}, Tokenize::character) == doctest::Approx(100.0));
        CHECK(corpus_bleu({"abcde"}, {"abcdf"}, Tokenize::character) < 100.0);
    }
    SUBCASE("empty hypothesis scores 0") {
        CHECK(corpus_bleu({""}, {"some reference"}) == 0.0);
    }
    SUBCASE("count mismatch is an error") {
        CHECK_THROWS_AS(corpus_bleu({"a"}, {"a", "b"}), MetricError);
        CHECK_THROWS_AS(corpus_bleu({}, {}), MetricError);
    }
}

TEST_CASE("mwer segmentation") {
    SUBCASE("clean split") {
        const auto seg = mwer_segment({"one", "two", "three", "four"}, {"one two", "three four"});
        CHECK(seg.total_edit_distance == 0);
        CHECK(seg.boundaries == std::vector<std::size_t>{2});
    }
    SUBCASE("case folding before comparison") {
        const auto seg = mwer_segment({"One", "TWO"}, {"one", "two"});
        CHECK(seg.total_edit_distance == 0);
    }
    SUBCASE("ties prefer the earliest boundary") {
        // splits 0|1 and 1|0 both cost 1; the earliest boundary wins
        const auto seg = mwer_segment({"aa"}, {"aa", "aa"});
        CHECK(seg.total_edit_distance == 1);
        CHECK(seg.boundaries == std::vector<std::size_t>{0});
    }
    SUBCASE("a reference can receive an empty piece") {
        const auto seg = mwer_segment({"one", "two"}, {"one two", "three four"});
        CHECK(seg.boundaries == std::vector<std::size_t>{2});
        const auto pieces = seg.pieces(2);
        CHECK(pieces[1].first == pieces[1].second);
        CHECK(seg.total_edit_distance == 2);  // two insertions for the empty piece
    }
    SUBCASE("pieces cover the hypothesis exactly") {
        const auto seg = mwer_segment({"a", "b", "c", "d", "e"}, {"a b", "c", "d e"});
        const auto pieces = seg.pieces(5);
        REQUIRE(pieces.size() == 3);
        CHECK(pieces.front().first == 0);
        CHECK(pieces.back().second == 5);
        for (std::size_t i = 1; i < pieces.size(); ++i)
            CHECK(pieces[i].first == pieces[i - 1].second);
    }
    SUBCASE("no references is an error") {
        CHECK_THROWS_AS(mwer_segment({"a"}, {}), MetricError);
    }
}

TEST_CASE("stream laal") {
    SUBCASE("hand-traced two-sentence document") {
        EmissionLog doc;
        doc.source_duration_ms = 4000;
        doc.items = {{"ein", 1000}, {"zwei", 1500}, {"drei", 2500},
                     {"vier", 2600}, {"fünf", 3400}};
        const std::vector<SpanRef> spans = {{0, 2000, "ein zwei drei"},
                                            {2000, 4000, "vier fünf"}};
        const auto report = stream_laal(doc, spans);
        REQUIRE(report.sentences.size() == 2);
        CHECK(report.evaluated == 2);
        CHECK(report.skipped == 0);
        CHECK(report.sentences[0].report.laal_ms == doctest::Approx(1000.0).epsilon(1e-12));
        CHECK(report.sentences[1].report.laal_ms == doctest::Approx(500.0).epsilon(1e-12));
        CHECK(report.mean_laal_ms == doctest::Approx(750.0).epsilon(1e-12));
    }
    SUBCASE("single-sentence documents reduce to plain LAAL bit-for-bit") {
        const auto log = log_of({700, 1200, 1900, 2300}, 2400);
        EmissionLog doc = log;
        doc.items[0].word = "alpha";
        doc.items[1].word = "beta";
        doc.items[2].word = "gamma";
        doc.items[3].word = "delta";
        const auto direct = average_lagging(doc, 4);
        const auto stream = stream_laal(doc, {{0, 2400, "alpha beta gamma delta"}});
        CHECK(stream.sentences[0].report.laal_ms == direct.laal_ms);  // bitwise
        CHECK(stream.mean_laal_ms == direct.laal_ms);
    }
    SUBCASE("empty pieces are skipped and counted") {
        EmissionLog doc;
        doc.source_duration_ms = 2000;
        doc.items = {{"one", 400}, {"two", 800}};
        const auto report = stream_laal(doc, {{0, 1000, "one two"}, {1000, 2000, "three four"}});
        CHECK(report.evaluated == 1);
        CHECK(report.skipped == 1);
        REQUIRE(report.sentences.size() == 2);
        CHECK(report.sentences[1].skipped);
    }
    SUBCASE("no spans is an error") {
        CHECK_THROWS_AS(stream_laal(log_of({10}, 100), {}), MetricError);
    }
}

TEST_CASE("run summaries parse back from the engine's json") {
    const auto fixture = testsupport::one_word_per_chunk("rs", 6, 500);
    auto store = std::make_shared<FixtureStore>();
    store->add(fixture);
    ScriptedBackend backend(store);
    PolicyConfig config;
    config.k = 2;
    config.chunk_ms = 500;
    const auto result = run_stream(make_stream(fixture, 500), backend, config);

    const auto summary = run_summary_from_json(run_summary_json(result, config, "rs", "simulst"));
    CHECK(summary.source_id == "rs");
    CHECK(summary.policy == "streamuni");
    CHECK(summary.k == 2);
    CHECK(summary.chunk_ms == 500);
    CHECK(summary.task == "simulst");
    CHECK(summary.hypothesis == result.hypothesis);
    CHECK(summary.duration_ms == 3000);
    REQUIRE(summary.emissions.items.size() == result.emissions.items.size());
    CHECK(summary.emissions.items.back().emit_ms == result.emissions.items.back().emit_ms);
    CHECK(summary.emissions.source_duration_ms == 3000);

    CHECK_THROWS_AS(run_summary_from_json("{broken"), streamst::ParseError);
}

TEST_CASE("quality report aggregation") {
    const auto make_summary = [](const std::string& id, int k, const std::string& task,
                                 const std::string& hyp, std::vector<std::int64_t> delays,
                                 std::int64_t duration) {
        RunSummary s;
        s.source_id = id;
        s.policy = "streamuni";
        s.k = k;
        s.chunk_ms = 500;
        s.task = task;
        s.duration_ms = duration;
        s.hypothesis = hyp;
        s.emissions.source_duration_ms = duration;
        const auto words = text::split_words(hyp);
        for (std::size_t i = 0; i < words.size(); ++i)
            s.emissions.items.push_back({words[i], delays[i]});
        return s;
    };

    SUBCASE("sentence mode groups by k and averages latency") {
        std::vector<RunSummary> summaries = {
            make_summary("a", 1, "simulst", "t1 t2", {500, 1000}, 1000),
            make_summary("b", 1, "simulst", "u1 u2", {600, 1000}, 1000),
            make_summary("a", 3, "simulst", "t1 t2", {900, 1000}, 1000),
            make_summary("b", 3, "simulst", "u1 u2", {950, 1000}, 1000),
        };
        std::vector<std::pair<std::string, RefEntry>> refs = {
            {"a", {"t1 t2", {}}},
            {"b", {"u1 u2", {}}},
        };
        const auto report = quality_report(summaries, refs, EvalMode::sentence);
        REQUIRE(report.rows.size() == 2);
        CHECK(report.rows[0].k == 1);
        CHECK(report.rows[1].k == 3);  // sorted by k
        CHECK(report.rows[0].bleu == doctest::Approx(100.0));
        REQUIRE(report.rows[0].al_ms.has_value());
        CHECK(*report.rows[0].al_ms < *report.rows[1].al_ms);
        CHECK_FALSE(report.rows[0].stream_laal_ms.has_value());

        const auto csv = quality_report_csv(report);
        CHECK(csv.find("policy,k,chunk_ms,bleu,al_ms,laal_ms,stream_laal_ms\n") == 0);
        CHECK(csv.find("streamuni,1,500,100.0000,") != std::string::npos);

        SUBCASE("mode mismatch is rejected") {
            CHECK_THROWS_AS(quality_report(summaries, refs, EvalMode::stream), MetricError);
        }
        SUBCASE("missing reference is rejected") {
            refs.pop_back();
            CHECK_THROWS_AS(quality_report(summaries, refs, EvalMode::sentence), MetricError);
        }
        SUBCASE("empty input is rejected") {
            CHECK_THROWS_AS(quality_report({}, refs, EvalMode::sentence), MetricError);
        }
    }
    SUBCASE("stream mode resegments and scores per sentence") {
        std::vector<RunSummary> summaries = {
            make_summary("d", 2, "streamst", "one two three four", {500, 900, 1400, 1900}, 2000),
        };
        std::vector<std::pair<std::string, RefEntry>> refs = {
            {"d", {"", {{0, 1000, "one two"}, {1000, 2000, "three four"}}}},
        };
        const auto report = quality_report(summaries, refs, EvalMode::stream);
        REQUIRE(report.rows.size() == 1);
        CHECK(report.rows[0].bleu == doctest::Approx(100.0));
        REQUIRE(report.rows[0].stream_laal_ms.has_value());
        CHECK_FALSE(report.rows[0].al_ms.has_value());

        const auto csv = quality_report_csv(report);
        CHECK(csv.find(",,") != std::string::npos);  // al/laal columns stay empty
    }
}
