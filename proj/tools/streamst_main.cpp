// streamst: run streaming-translation policies over fixture manifests,
// score the results, build CoT training data, and host the wire-protocol
// stub server. Exit codes: 0 success, 1 partial/runtime failure, 2 bad
// configuration.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "streamst/cot.hpp"
#include "streamst/errors.hpp"
#include "streamst/harness.hpp"
#include "streamst/metrics.hpp"
#include "streamst/policy.hpp"
#include "streamst/stub_server.hpp"
#include "streamst/trace.hpp"

namespace {

using streamst::harness::read_file;
using streamst::harness::write_file_atomic;

int cmd_run(const streamst::harness::RunConfig& config) {
    const auto outcome = streamst::harness::execute_run(config);
    for (const auto& item : outcome.items)
        if (!item.ok)
            std::fprintf(stderr, "FAIL %s k=%d: %s\n", item.source_id.c_str(), item.k,
                         item.error.c_str());
    std::printf("ran %zu item(s), %zu failure(s), output in %s\n", outcome.items.size(),
                outcome.failures(), config.output_dir.c_str());
    return outcome.failures() == 0 ? 0 : 1;
}

int cmd_eval(const streamst::harness::EvalConfig& config) {
    const auto report = streamst::harness::evaluate_run(config);
    std::fputs(streamst::metrics::quality_report_csv(report).c_str(), stdout);
    return 0;
}

int cmd_build_cot(const std::string& manifest, double ratio, std::uint64_t seed,
                  const std::string& out_path) {
    auto store = std::make_shared<streamst::FixtureStore>();
    store->load_manifest_file(manifest);
    streamst::cot::CotRecipe recipe;
    recipe.streaming_hours_ratio = ratio;
    const auto examples = streamst::cot::build_dataset(*store, recipe, seed);
    write_file_atomic(out_path, streamst::cot::dataset_to_jsonl(examples));
    std::printf("wrote %zu example(s) to %s\n", examples.size(), out_path.c_str());
    return 0;
}

int cmd_stub_server(const std::string& manifest, const std::string& host, int port,
                    const streamst::StubFault& fault, const std::string& auth_token) {
    auto store = std::make_shared<streamst::FixtureStore>();
    store->load_manifest_file(manifest);
    streamst::StubServer server(store, fault, auth_token);
    std::printf("serving %zu fixture(s) on http://%s:%d\n", store->size(), host.c_str(), port);
    std::fflush(stdout);
    if (!server.run(host, port)) {
        std::fprintf(stderr, "could not bind %s:%d\n", host.c_str(), port);
        return 2;
    }
    return 0;
}

int cmd_replay(const std::string& trace_path, const std::string& summary_path) {
    const auto events = streamst::trace_from_jsonl(read_file(trace_path));
    const auto summary = streamst::metrics::run_summary_from_json(read_file(summary_path));

    streamst::PolicyConfig config;
    config.k = summary.k;
    config.chunk_ms = summary.chunk_ms;
    config.policy_kind = streamst::policy_kind_from_string(summary.policy);
    streamst::StreamMeta meta;
    meta.source_id = summary.source_id;
    meta.chunk_ms = summary.chunk_ms;
    meta.total_chunks = static_cast<int>(summary.duration_ms / summary.chunk_ms);

    const auto state = streamst::replay(events, config, meta);
    const std::string hypothesis = streamst::trace_hypothesis(events);
    const auto emissions = streamst::trace_emissions(events, summary.duration_ms);

    if (hypothesis != summary.hypothesis) {
        std::fprintf(stderr, "replay mismatch: trace yields \"%s\", summary says \"%s\"\n",
                     hypothesis.c_str(), summary.hypothesis.c_str());
        return 1;
    }
    if (emissions.items.size() != summary.emissions.items.size()) {
        std::fprintf(stderr, "replay mismatch: %zu emissions in trace, %zu in summary\n",
                     emissions.items.size(), summary.emissions.items.size());
        return 1;
    }
    for (std::size_t i = 0; i < emissions.items.size(); ++i)
        if (emissions.items[i].emit_ms != summary.emissions.items[i].emit_ms) {
            std::fprintf(stderr, "replay mismatch: emission %zu at %lld ms vs %lld ms\n", i,
                         static_cast<long long>(emissions.items[i].emit_ms),
                         static_cast<long long>(summary.emissions.items[i].emit_ms));
            return 1;
        }
    std::printf("replay ok: %zu event(s), %zu segment(s) closed, hypothesis matches summary\n",
                events.size(), static_cast<std::size_t>(state.segments_closed));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming speech translation policy engine and evaluation harness"};
    app.require_subcommand(1);

    // --- run ---
    streamst::harness::RunConfig run_config;
    auto* run = app.add_subcommand("run", "simulate policies over a fixture manifest");
    run->add_option("--manifest", run_config.manifest_path, "fixture manifest (JSONL)")
        ->required();
    run->add_option("--out", run_config.output_dir, "directory for traces and summaries")
        ->required();
    run->add_option("--backend", run_config.backend, "scripted | remote")
        ->check(CLI::IsMember({"scripted", "remote"}));
    run->add_option("--url", run_config.remote_url, "remote backend base url");
    run->add_option("--timeout-ms", run_config.remote_timeout_ms, "remote request timeout");
    run->add_option("--auth-token", run_config.auth_token, "remote bearer token")
        ->envname("STREAMST_AUTH_TOKEN");
    run->add_option("--policy", run_config.policy, "streamuni | wait_k")
        ->check(CLI::IsMember({"streamuni", "wait_k"}));
    run->add_option("--k", run_config.k_grid, "lag grid, e.g. --k 1 3 5 7 9");
    run->add_option("--chunk-ms", run_config.chunk_ms, "chunk duration in ms");
    run->add_option("--task", run_config.task, "simulst | streamst")
        ->check(CLI::IsMember({"simulst", "streamst"}));
    run->add_option("--seed", run_config.seed, "run seed");
    run->add_option("--jobs", run_config.jobs, "parallel fixtures");
    run->add_flag("--wall-clock", run_config.wall_clock,
                  "add measured backend latency to event times");

    // --- eval ---
    streamst::harness::EvalConfig eval_config;
    auto* eval = app.add_subcommand("eval", "aggregate run summaries into quality/latency curves");
    eval->add_option("--run-dir", eval_config.run_dir, "directory produced by `run`")
        ->required();
    eval->add_option("--manifest", eval_config.manifest_path, "fixture manifest with references")
        ->required();
    eval->add_option("--mode", eval_config.mode, "sentence | stream")
        ->check(CLI::IsMember({"sentence", "stream"}));
    eval->add_option("--tokenize", eval_config.tokenize, "whitespace_punct | char")
        ->check(CLI::IsMember({"whitespace_punct", "char"}));
    eval->add_option("--report", eval_config.report_path, "write report JSON here");
    eval->add_option("--csv", eval_config.csv_path, "write curve CSV here");

    // --- build-cot ---
    std::string cot_manifest, cot_out;
    double cot_ratio = 0.5;
    std::uint64_t cot_seed = 0;
    auto* build_cot = app.add_subcommand("build-cot", "emit streaming-CoT training examples");
    build_cot->add_option("--manifest", cot_manifest, "fixture manifest (JSONL)")->required();
    build_cot->add_option("--out", cot_out, "output JSONL path")->required();
    build_cot->add_option("--ratio", cot_ratio, "streaming share of audio hours, in [0,1]");
    build_cot->add_option("--seed", cot_seed, "sampling seed");

    // --- stub-server ---
    std::string stub_manifest, stub_host = "127.0.0.1", stub_auth, fault_kind = "none";
    int stub_port = 8900;
    streamst::StubFault fault;
    auto* stub = app.add_subcommand("stub-server", "serve the wire protocol from fixtures");
    stub->add_option("--manifest", stub_manifest, "fixture manifest (JSONL)")->required();
    stub->add_option("--host", stub_host, "bind address");
    stub->add_option("--port", stub_port, "bind port");
    stub->add_option("--fault", fault_kind, "none | delay | http500 | retract")
        ->check(CLI::IsMember({"none", "delay", "http500", "retract"}));
    stub->add_option("--fault-endpoint", fault.endpoint, "transcribe | translate")
        ->check(CLI::IsMember({"transcribe", "translate"}));
    stub->add_option("--fault-chunk", fault.at_chunk, "chunk index to misbehave at, -1 = all");
    stub->add_option("--fault-delay-ms", fault.delay_ms, "sleep for the delay fault");
    stub->add_option("--auth-token", stub_auth, "require this bearer token")
        ->envname("STREAMST_AUTH_TOKEN");

    // --- replay ---
    std::string replay_trace, replay_summary;
    auto* replay = app.add_subcommand("replay", "re-apply a trace and check it against a summary");
    replay->add_option("--trace", replay_trace, "trace JSONL path")->required();
    replay->add_option("--summary", replay_summary, "summary JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(run_config);
        if (eval->parsed()) return cmd_eval(eval_config);
        if (build_cot->parsed()) return cmd_build_cot(cot_manifest, cot_ratio, cot_seed, cot_out);
        if (stub->parsed()) {
            fault.kind = streamst::fault_kind_from_string(fault_kind);
            return cmd_stub_server(stub_manifest, stub_host, stub_port, fault, stub_auth);
        }
        if (replay->parsed()) return cmd_replay(replay_trace, replay_summary);
    } catch (const streamst::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const streamst::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
