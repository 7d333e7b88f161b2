#include "streamst/harness.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "streamst/errors.hpp"
#include "streamst/policy.hpp"
#include "streamst/remote_backend.hpp"
#include "streamst/trace.hpp"

namespace streamst::harness {

namespace fs = std::filesystem;
using nlohmann::json;

void RunConfig::validate() const {
    if (manifest_path.empty()) throw ConfigError("run needs a manifest path");
    if (output_dir.empty()) throw ConfigError("run needs an output directory");
    if (backend != "scripted" && backend != "remote")
        throw ConfigError("unknown backend: " + backend);
    if (backend == "remote" && remote_url.empty())
        throw ConfigError("remote backend needs --url");
    if (policy != "streamuni" && policy != "wait_k")
        throw ConfigError("unknown policy: " + policy);
    if (task != "simulst" && task != "streamst") throw ConfigError("unknown task: " + task);
    if (k_grid.empty()) throw ConfigError("k grid must not be empty");
    for (int k : k_grid)
        if (k < 1) throw ConfigError("k must be >= 1, got " + std::to_string(k));
    if (chunk_ms <= 0) throw ConfigError("chunk_ms must be positive");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

std::size_t RunOutcome::failures() const {
    std::size_t n = 0;
    for (const auto& item : items)
        if (!item.ok) ++n;
    return n;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunOutcome execute_run(const RunConfig& config) {
    config.validate();

    auto store = std::make_shared<FixtureStore>();
    store->load_manifest_file(config.manifest_path);
    if (store->size() == 0) throw ConfigError("manifest lists no fixtures");

    if (config.task == "streamst") {
        for (const auto& id : store->source_ids())
            if (store->get(id).sentence_spans.empty())
                throw ConfigError("streamst task needs sentence spans, but fixture " + id +
                                  " has none");
    }

    std::unique_ptr<Backend> backend;
    if (config.backend == "scripted") {
        backend = std::make_unique<ScriptedBackend>(store);
    } else {
        RemoteOptions options;
        options.base_url = config.remote_url;
        options.timeout_ms = config.remote_timeout_ms;
        options.auth_token = config.auth_token;
        backend = std::make_unique<RemoteBackend>(std::move(options));
    }

    std::vector<int> grid = config.k_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    RunOutcome outcome;
    for (const auto& id : store->source_ids())
        for (int k : grid) {
            RunItem item;
            item.source_id = id;
            item.k = k;
            outcome.items.push_back(std::move(item));
        }

    fs::create_directories(config.output_dir);

    const auto run_one = [&](RunItem& item) {
        const Fixture& fixture = store->get(item.source_id);
        PolicyConfig policy;
        policy.k = item.k;
        policy.chunk_ms = config.chunk_ms;
        policy.policy_kind = policy_kind_from_string(config.policy);
        policy.target_lang = fixture.target_lang;
        policy.wall_clock = config.wall_clock;

        const SpeechStream stream = make_stream(fixture, config.chunk_ms);
        const std::string stem =
            (fs::path(config.output_dir) / (item.source_id + "_k" + std::to_string(item.k)))
                .string();
        try {
            const RunResult result = policy.policy_kind == PolicyKind::wait_k
                                         ? wait_k_policy(stream, *backend, policy)
                                         : run_stream(stream, *backend, policy);
            write_file_atomic(stem + ".trace.jsonl", trace_to_jsonl(result.trace));
            write_file_atomic(stem + ".summary.json",
                              run_summary_json(result, policy, item.source_id, config.task));
            item.trace_path = stem + ".trace.jsonl";
            item.summary_path = stem + ".summary.json";
            item.ok = true;
        } catch (const Error& e) {
            item.error = e.what();
        }
    };

    if (config.jobs <= 1 || outcome.items.size() <= 1) {
        for (auto& item : outcome.items) run_one(item);
    } else {
        std::atomic<std::size_t> next{0};
        const int workers =
            std::min<int>(config.jobs, static_cast<int>(outcome.items.size()));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < outcome.items.size();
                     i = next.fetch_add(1))
                    run_one(outcome.items[i]);
            });
        for (auto& t : pool) t.join();
    }

    if (outcome.failures() > 0) {
        json failures = json::array();
        for (const auto& item : outcome.items)
            if (!item.ok)
                failures.push_back({{"source_id", item.source_id},
                                    {"k", item.k},
                                    {"error", item.error}});
        write_file_atomic((fs::path(config.output_dir) / "failures.json").string(),
                          failures.dump(2) + "\n");
    }
    return outcome;
}

metrics::QualityReport evaluate_run(const EvalConfig& config) {
    if (config.run_dir.empty()) throw ConfigError("eval needs a run directory");
    if (config.manifest_path.empty()) throw ConfigError("eval needs the fixture manifest");

    std::vector<std::string> summary_paths;
    if (!fs::is_directory(config.run_dir))
        throw ConfigError("not a directory: " + config.run_dir);
    for (const auto& entry : fs::directory_iterator(config.run_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.ends_with(".summary.json"))
            summary_paths.push_back(entry.path().string());
    }
    std::sort(summary_paths.begin(), summary_paths.end());
    if (summary_paths.empty())
        throw MetricError("no run summaries under " + config.run_dir);

    std::vector<metrics::RunSummary> summaries;
    summaries.reserve(summary_paths.size());
    for (const auto& path : summary_paths)
        summaries.push_back(metrics::run_summary_from_json(read_file(path)));

    FixtureStore store;
    store.load_manifest_file(config.manifest_path);
    std::vector<std::pair<std::string, metrics::RefEntry>> refs;
    for (const auto& id : store.source_ids()) {
        const Fixture& fixture = store.get(id);
        metrics::RefEntry entry;
        entry.ref_text = fixture.ref_translation_text();
        for (const auto& span : fixture.sentence_spans)
            entry.spans.push_back({span.start_ms, span.end_ms, span.ref});
        refs.emplace_back(id, std::move(entry));
    }

    const auto report = metrics::quality_report(summaries, refs,
                                                metrics::eval_mode_from_string(config.mode),
                                                metrics::tokenize_from_string(config.tokenize));
    if (!config.csv_path.empty())
        write_file_atomic(config.csv_path, metrics::quality_report_csv(report));
    if (!config.report_path.empty())
        write_file_atomic(config.report_path, metrics::quality_report_json(report) + "\n");
    return report;
}

}  // namespace streamst::harness
