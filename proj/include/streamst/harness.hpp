#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "streamst/metrics.hpp"

namespace streamst::harness {

struct RunConfig {
    std::string manifest_path;
    std::string backend = "scripted";  // "scripted" | "remote"
    std::string remote_url;
    int remote_timeout_ms = 30000;
    std::string auth_token;
    std::string policy = "streamuni";  // "streamuni" | "wait_k"
    std::vector<int> k_grid = {3};
    std::int64_t chunk_ms = 640;
    std::string task = "simulst";  // "simulst" | "streamst"
    std::string output_dir;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool wall_clock = false;

    // Throws ConfigError on contradictions (unknown backend/policy/task,
    // empty k grid, remote without a url, ...).
    void validate() const;
};

struct RunItem {
    std::string source_id;
    int k = 0;
    bool ok = false;
    std::string error;  // failure reason when !ok
    std::string trace_path;
    std::string summary_path;
};

struct RunOutcome {
    std::vector<RunItem> items;

    std::size_t failures() const;
};

// Runs every fixture in the manifest against every k in the grid, writing
// <source_id>_k<k>.trace.jsonl and .summary.json into output_dir (atomically,
// via temp file + rename). A streamst task refuses to start unless every
// fixture carries sentence spans. Failures are recorded per item, and in
// failures.json when any occur; they never abort the remaining grid.
RunOutcome execute_run(const RunConfig& config);

struct EvalConfig {
    std::string run_dir;
    std::string manifest_path;  // references come from the fixtures
    std::string mode = "sentence";
    std::string tokenize = "whitespace_punct";
    std::string report_path;  // JSON, optional
    std::string csv_path;     // curve CSV, optional
};

// Loads every *.summary.json under run_dir and aggregates quality/latency per
// (policy, k, chunk_ms). Writes the report files when paths are given.
metrics::QualityReport evaluate_run(const EvalConfig& config);

// Temp-file-then-rename write; parent directories are created.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace streamst::harness
