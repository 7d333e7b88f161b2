// Python bindings for the engine's main operations. The surface is
// deliberately value-oriented: fixtures travel as their JSON serialization,
// results come back as plain dicts/tuples, so no C++ object outlives a call.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "streamst/backend.hpp"
#include "streamst/cot.hpp"
#include "streamst/errors.hpp"
#include "streamst/fixture.hpp"
#include "streamst/metrics.hpp"
#include "streamst/policy.hpp"
#include "streamst/trace.hpp"

namespace py = pybind11;
using namespace streamst;

namespace {

using WordTimes = std::vector<std::pair<std::string, std::int64_t>>;

EmissionLog make_log(const WordTimes& items, std::int64_t duration_ms) {
    EmissionLog log;
    log.source_duration_ms = duration_ms;
    for (const auto& [word, ms] : items) log.items.push_back({word, ms});
    return log;
}

py::dict latency_dict(const metrics::LatencyReport& report) {
    py::dict out;
    out["al_ms"] = report.al_ms;
    out["laal_ms"] = report.laal_ms;
    out["tau"] = report.tau;
    out["gamma"] = report.gamma;
    return out;
}

py::list segments_list(const std::vector<SegmentRecord>& segments) {
    py::list out;
    for (const auto& s : segments) out.append(py::make_tuple(s.a, s.b, to_string(s.rule)));
    return out;
}

py::dict outputs_dict(const std::vector<Event>& trace, std::int64_t duration_ms) {
    py::dict out;
    out["hypothesis"] = trace_hypothesis(trace);
    py::list emissions;
    for (const auto& item : trace_emissions(trace, duration_ms).items)
        emissions.append(py::make_tuple(item.word, item.emit_ms));
    out["emissions"] = emissions;
    out["segments"] = segments_list(trace_segments(trace));
    out["trace_jsonl"] = trace_to_jsonl(trace);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Streaming speech-translation policy engine and metrics";

    // Exception translators run newest-first, so register the base before the
    // refinements callers actually want to catch.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<MetricError>(m, "MetricError", PyExc_ValueError);

    m.def(
        "run_fixture",
        [](const std::string& fixture_json, int k, const std::string& policy,
           std::int64_t chunk_ms) {
            const Fixture fixture = fixture_from_json(fixture_json);
            PolicyConfig config;
            config.k = k;
            config.policy_kind = policy_kind_from_string(policy);
            config.chunk_ms = chunk_ms > 0 ? chunk_ms : fixture.chunk_ms;
            config.target_lang = fixture.target_lang;
            auto store = std::make_shared<FixtureStore>();
            store->add(fixture);
            ScriptedBackend backend(store);
            const auto stream = make_stream(fixture, config.chunk_ms);
            const auto result = config.policy_kind == PolicyKind::wait_k
                                    ? wait_k_policy(stream, backend, config)
                                    : run_stream(stream, backend, config);
            return outputs_dict(result.trace, stream.duration_ms());
        },
        py::arg("fixture_json"), py::arg("k") = 3, py::arg("policy") = "streamuni",
        py::arg("chunk_ms") = 0,
        "Run one fixture through the scripted backend and return hypothesis, "
        "per-word emissions, closed segments and the event trace.");

    m.def(
        "replay_trace",
        [](const std::string& trace_jsonl) {
            const auto events = trace_from_jsonl(trace_jsonl);
            replay(events, PolicyConfig{});  // validates event consistency
            return outputs_dict(events, 0);
        },
        py::arg("trace_jsonl"),
        "Validate an event trace and return the outputs it reconstructs.");

    m.def(
        "average_lagging",
        [](const WordTimes& emissions, std::int64_t duration_ms,
           std::optional<std::size_t> ref_len) {
            return latency_dict(metrics::average_lagging(make_log(emissions, duration_ms), ref_len));
        },
        py::arg("emissions"), py::arg("duration_ms"), py::arg("ref_len") = std::nullopt,
        "AL/LAAL over (word, emit_ms) pairs against a source of duration_ms.");

    m.def(
        "corpus_bleu",
        [](const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
           const std::string& tokenize) {
            return metrics::corpus_bleu(hyps, refs, metrics::tokenize_from_string(tokenize));
        },
        py::arg("hyps"), py::arg("refs"), py::arg("tokenize") = "whitespace_punct");

    m.def(
        "mwer_segment",
        [](const std::vector<std::string>& hyp_words,
           const std::vector<std::string>& ref_sentences) {
            const auto seg = metrics::mwer_segment(hyp_words, ref_sentences);
            return py::make_tuple(seg.boundaries, seg.total_edit_distance);
        },
        py::arg("hyp_words"), py::arg("ref_sentences"),
        "Minimum-WER split of a document hypothesis; returns (boundaries, edit_distance).");

    m.def(
        "stream_laal",
        [](const WordTimes& emissions, std::int64_t duration_ms,
           const std::vector<std::tuple<std::int64_t, std::int64_t, std::string>>& spans) {
            std::vector<metrics::SpanRef> refs;
            for (const auto& [start, end, ref] : spans) refs.push_back({start, end, ref});
            const auto report = metrics::stream_laal(make_log(emissions, duration_ms), refs);
            py::dict out;
            out["mean_laal_ms"] = report.mean_laal_ms;
            out["evaluated"] = report.evaluated;
            out["skipped"] = report.skipped;
            py::list sentences;
            for (const auto& s : report.sentences) {
                py::dict row;
                row["index"] = s.index;
                row["skipped"] = s.skipped;
                if (!s.skipped) row["laal_ms"] = s.report.laal_ms;
                sentences.append(row);
            }
            out["sentences"] = sentences;
            return out;
        },
        py::arg("emissions"), py::arg("duration_ms"), py::arg("spans"),
        "Document-level LAAL: resegment emissions against (start_ms, end_ms, ref) spans.");

    m.def(
        "build_cot_dataset",
        [](const std::vector<std::string>& fixture_jsons, double streaming_hours_ratio,
           std::uint64_t seed) {
            FixtureStore store;
            for (const auto& text : fixture_jsons) store.add(fixture_from_json(text));
            return cot::dataset_to_jsonl(cot::build_dataset(store, {streaming_hours_ratio}, seed));
        },
        py::arg("fixture_jsons"), py::arg("streaming_hours_ratio") = 0.5, py::arg("seed") = 0,
        "Deterministic chain-of-thought training examples as JSONL, one per fixture.");

    m.def(
        "fixture_roundtrip",
        [](const std::string& fixture_json) { return fixture_to_json(fixture_from_json(fixture_json)); },
        py::arg("fixture_json"), "Parse, validate and re-serialize a fixture (canonical form).");
}
