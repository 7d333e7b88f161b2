#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "streamst/errors.hpp"
#include "streamst/harness.hpp"
#include "streamst/stub_server.hpp"
#include "support/test_fixtures.hpp"

using namespace streamst;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

// three small fixtures plus a manifest, all inside dir
std::string write_manifest(const fs::path& dir, bool with_spans) {
    std::vector<Fixture> fixtures = {
        with_spans ? testsupport::two_sentences("h1", 3, 2, 500)
                   : testsupport::one_word_per_chunk("h1", 5, 500),
        with_spans ? testsupport::two_sentences("h2", 2, 3, 500)
                   : testsupport::one_word_per_chunk("h2", 6, 500),
    };
    std::ofstream manifest(dir / "manifest.jsonl");
    for (const auto& f : fixtures) {
        std::ofstream out(dir / (f.source_id + ".json"));
        out << fixture_to_json(f);
        manifest << "\"" << f.source_id << ".json\"\n";
    }
    return (dir / "manifest.jsonl").string();
}

}  // namespace

TEST_CASE("execute_run writes a trace and summary per fixture and k") {
    TempDir dir("streamst_harness_run");
    harness::RunConfig config;
    config.manifest_path = write_manifest(dir.path, false);
    config.output_dir = (dir.path / "out").string();
    config.k_grid = {1, 3};
    config.chunk_ms = 500;

    const auto outcome = harness::execute_run(config);
    CHECK(outcome.items.size() == 4);
    CHECK(outcome.failures() == 0);
    for (const auto& item : outcome.items) {
        CHECK(fs::exists(item.trace_path));
        CHECK(fs::exists(item.summary_path));
    }
    CHECK_FALSE(fs::exists(dir.path / "out" / "failures.json"));

    SUBCASE("reruns are byte-identical") {
        const auto before = harness::read_file(outcome.items[0].summary_path);
        harness::RunConfig again = config;
        again.output_dir = (dir.path / "out2").string();
        const auto second = harness::execute_run(again);
        CHECK(harness::read_file(second.items[0].summary_path) == before);
        CHECK(harness::read_file(second.items[0].trace_path) ==
              harness::read_file(outcome.items[0].trace_path));
    }
    SUBCASE("parallel execution produces the same bytes") {
        harness::RunConfig parallel = config;
        parallel.output_dir = (dir.path / "outp").string();
        parallel.jobs = 4;
        const auto par = harness::execute_run(parallel);
        CHECK(par.failures() == 0);
        REQUIRE(par.items.size() == outcome.items.size());
        for (std::size_t i = 0; i < par.items.size(); ++i)
            CHECK(harness::read_file(par.items[i].trace_path) ==
                  harness::read_file(outcome.items[i].trace_path));
    }
}

TEST_CASE("execute_run validates its configuration up front") {
    harness::RunConfig config;
    CHECK_THROWS_AS(harness::execute_run(config), ConfigError);  // no manifest

    TempDir dir("streamst_harness_badcfg");
    config.manifest_path = write_manifest(dir.path, false);
    config.output_dir = (dir.path / "out").string();

    SUBCASE("bad k") {
        config.k_grid = {0};
        CHECK_THROWS_AS(harness::execute_run(config), ConfigError);
    }
    SUBCASE("remote without url") {
        config.backend = "remote";
        CHECK_THROWS_AS(harness::execute_run(config), ConfigError);
    }
    SUBCASE("streamst task requires sentence spans on every fixture") {
        config.task = "streamst";
        CHECK_THROWS_AS(harness::execute_run(config), ConfigError);
        // and nothing was written
        CHECK_FALSE(fs::exists(dir.path / "out" / "h1_k3.summary.json"));
    }
}

TEST_CASE("remote failures are recorded per item without aborting the grid") {
    TempDir dir("streamst_harness_fail");
    harness::RunConfig config;
    config.manifest_path = write_manifest(dir.path, false);
    config.output_dir = (dir.path / "out").string();
    config.backend = "remote";
    config.remote_url = "http://127.0.0.1:1";  // closed port
    config.remote_timeout_ms = 300;
    config.k_grid = {1, 2};

    const auto outcome = harness::execute_run(config);
    CHECK(outcome.items.size() == 4);
    CHECK(outcome.failures() == 4);
    for (const auto& item : outcome.items) CHECK_FALSE(item.error.empty());
    CHECK(fs::exists(dir.path / "out" / "failures.json"));
}

TEST_CASE("evaluate_run aggregates what execute_run wrote") {
    TempDir dir("streamst_harness_eval");

    SUBCASE("sentence mode") {
        harness::RunConfig config;
        config.manifest_path = write_manifest(dir.path, false);
        config.output_dir = (dir.path / "out").string();
        config.k_grid = {1, 3, 5};
        config.chunk_ms = 500;
        REQUIRE(harness::execute_run(config).failures() == 0);

        harness::EvalConfig eval;
        eval.run_dir = config.output_dir;
        eval.manifest_path = config.manifest_path;
        eval.csv_path = (dir.path / "curve.csv").string();
        eval.report_path = (dir.path / "report.json").string();
        const auto report = harness::evaluate_run(eval);

        REQUIRE(report.rows.size() == 3);
        CHECK(report.rows[0].k == 1);
        CHECK(report.rows[2].k == 5);
        for (const auto& row : report.rows) CHECK(row.bleu == doctest::Approx(100.0));
        // scripted runs hit the ideal wait-style lag: AL grows with k
        CHECK(*report.rows[0].al_ms < *report.rows[1].al_ms);
        CHECK(*report.rows[1].al_ms < *report.rows[2].al_ms);
        CHECK(fs::exists(eval.csv_path));
        CHECK(fs::exists(eval.report_path));
        const auto csv = harness::read_file(eval.csv_path);
        CHECK(csv.find("policy,k,chunk_ms,") == 0);
    }
    SUBCASE("stream mode") {
        harness::RunConfig config;
        config.manifest_path = write_manifest(dir.path, true);
        config.output_dir = (dir.path / "out").string();
        config.k_grid = {2};
        config.chunk_ms = 500;
        config.task = "streamst";
        REQUIRE(harness::execute_run(config).failures() == 0);

        harness::EvalConfig eval;
        eval.run_dir = config.output_dir;
        eval.manifest_path = config.manifest_path;
        eval.mode = "stream";
        const auto report = harness::evaluate_run(eval);
        REQUIRE(report.rows.size() == 1);
        CHECK(report.rows[0].stream_laal_ms.has_value());
        CHECK(report.rows[0].bleu == doctest::Approx(100.0));
    }
    SUBCASE("an empty run directory is an error") {
        fs::create_directories(dir.path / "empty");
        harness::EvalConfig eval;
        eval.run_dir = (dir.path / "empty").string();
        eval.manifest_path = write_manifest(dir.path, false);
        CHECK_THROWS_AS(harness::evaluate_run(eval), MetricError);
    }
}

TEST_CASE("run against the loopback stub matches the scripted backend") {
    TempDir dir("streamst_harness_loopback");
    const std::string manifest = write_manifest(dir.path, false);

    auto store = std::make_shared<FixtureStore>();
    store->load_manifest_file(manifest);
    StubServer server(store);
    const int port = server.start();

    harness::RunConfig scripted;
    scripted.manifest_path = manifest;
    scripted.output_dir = (dir.path / "scripted").string();
    scripted.k_grid = {2};
    scripted.chunk_ms = 500;

    harness::RunConfig remote = scripted;
    remote.output_dir = (dir.path / "remote").string();
    remote.backend = "remote";
    remote.remote_url = "http://127.0.0.1:" + std::to_string(port);

    const auto a = harness::execute_run(scripted);
    const auto b = harness::execute_run(remote);
    server.stop();

    REQUIRE(a.failures() == 0);
    REQUIRE(b.failures() == 0);
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i)
        CHECK(harness::read_file(a.items[i].trace_path) ==
              harness::read_file(b.items[i].trace_path));
}
