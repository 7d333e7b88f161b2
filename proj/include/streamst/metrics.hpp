#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "streamst/types.hpp"

namespace streamst::metrics {

struct LatencyReport {
    double al_ms = 0.0;
    double laal_ms = 0.0;
    std::size_t tau = 0;     // cutoff index (1-based)
    double gamma = 0.0;      // hyp_len / T, the AL normalization rate
};

// Average Lagging over the recorded per-word delays:
//   AL = (1/tau) * sum_{i<=tau} (d_i - (i-1) * T / L)
// with L = hyp length for AL and L = max(hyp, ref) for LAAL. tau is the first
// index whose delay reaches T (>=, so wall-clock delays past the stream end
// behave sensibly), or the hypothesis length when none does. Throws
// MetricError on an empty log or T <= 0.
LatencyReport average_lagging(const EmissionLog& log,
                              std::optional<std::size_t> ref_len = std::nullopt);

enum class Tokenize { whitespace_punct, character };

Tokenize tokenize_from_string(const std::string& s);
std::string to_string(Tokenize t);

// Corpus BLEU, n-grams 1..4 pooled over the corpus, geometric mean, brevity
// penalty exp(1 - ref/hyp) when the hypothesis is shorter. No smoothing: any
// zero n-gram precision zeroes the score. Orders the hypothesis corpus is too
// short to populate at all are skipped rather than zeroed, so identity pairs
// score 100 regardless of length. Returns a value in [0, 100].
double corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                   Tokenize tokenize = Tokenize::whitespace_punct);

struct Segmentation {
    // R-1 nondecreasing hyp-word indices splitting the hypothesis into R
    // contiguous (possibly empty) pieces; piece r = hyp[bounds[r-1], bounds[r])
    // with implicit bounds 0 and |hyp|.
    std::vector<std::size_t> boundaries;
    long total_edit_distance = 0;

    std::vector<std::pair<std::size_t, std::size_t>> pieces(std::size_t hyp_len) const;
};

// Split a document-level hypothesis against sentence references by dynamic
// programming over (hyp position, ref index), minimizing the summed
// word-level Levenshtein distance. Tokens are compared lowercased. Ties break
// toward earlier boundaries.
Segmentation mwer_segment(const std::vector<std::string>& hyp_words,
                          const std::vector<std::string>& ref_sentences);

struct SentenceLatency {
    std::size_t index = 0;
    bool skipped = false;  // empty hypothesis piece
    LatencyReport report;
};

struct StreamLatencyReport {
    std::vector<SentenceLatency> sentences;
    double mean_laal_ms = 0.0;  // unweighted over evaluated sentences
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

struct SpanRef {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    std::string ref;
};

// StreamLAAL: resegment the document emissions against the reference
// sentences, then score each sentence with LAAL using delays relative to its
// span start. Negative delays from resegmentation are kept, not clamped.
StreamLatencyReport stream_laal(const EmissionLog& doc_log, const std::vector<SpanRef>& spans);

// --- aggregation ------------------------------------------------------------

struct RunSummary {
    std::string source_id;
    std::string policy;
    int k = 0;
    std::int64_t chunk_ms = 0;
    std::string task;  // "simulst" | "streamst"
    std::int64_t duration_ms = 0;
    std::string hypothesis;
    EmissionLog emissions;
};

RunSummary run_summary_from_json(const std::string& json_text);

struct RefEntry {
    std::string ref_text;        // sentence-level reference (simulst)
    std::vector<SpanRef> spans;  // document spans (streamst)
};

enum class EvalMode { sentence, stream };

EvalMode eval_mode_from_string(const std::string& s);

struct CurveRow {
    std::string policy;
    int k = 0;
    std::int64_t chunk_ms = 0;
    double bleu = 0.0;
    std::optional<double> al_ms;
    std::optional<double> laal_ms;
    std::optional<double> stream_laal_ms;
};

struct QualityReport {
    std::vector<CurveRow> rows;  // one per (policy, k, chunk_ms), sorted by k
};

// Aggregate run summaries into corpus metrics. refs maps source_id to its
// reference; every summary must find one. Throws MetricError on an empty run
// set, a task/mode mismatch, or a missing reference.
QualityReport quality_report(const std::vector<RunSummary>& summaries,
                             const std::vector<std::pair<std::string, RefEntry>>& refs,
                             EvalMode mode, Tokenize tokenize = Tokenize::whitespace_punct);

std::string quality_report_csv(const QualityReport& report);
std::string quality_report_json(const QualityReport& report);

}  // namespace streamst::metrics
