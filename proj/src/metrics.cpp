#include "streamst/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "streamst/errors.hpp"
#include "streamst/text.hpp"

namespace streamst::metrics {

using nlohmann::json;

LatencyReport average_lagging(const EmissionLog& log, std::optional<std::size_t> ref_len) {
    if (log.items.empty()) throw MetricError("average lagging undefined for an empty emission log");
    if (log.source_duration_ms <= 0) throw MetricError("source duration must be positive");

    const double t_total = static_cast<double>(log.source_duration_ms);
    const std::size_t hyp_len = log.items.size();

    std::size_t tau = hyp_len;
    for (std::size_t i = 0; i < hyp_len; ++i) {
        if (static_cast<double>(log.items[i].emit_ms) >= t_total) {
            tau = i + 1;
            break;
        }
    }

    const auto lagging = [&](std::size_t len) {
        const double ideal = t_total / static_cast<double>(len);
        double sum = 0.0;
        for (std::size_t i = 0; i < tau; ++i)
            sum += static_cast<double>(log.items[i].emit_ms) - static_cast<double>(i) * ideal;
        return sum / static_cast<double>(tau);
    };

    LatencyReport report;
    report.tau = tau;
    report.gamma = static_cast<double>(hyp_len) / t_total;
    report.al_ms = lagging(hyp_len);
    report.laal_ms = lagging(std::max(hyp_len, ref_len.value_or(0)));
    return report;
}

Tokenize tokenize_from_string(const std::string& s) {
    if (s == "whitespace_punct") return Tokenize::whitespace_punct;
    if (s == "char") return Tokenize::character;
    throw ConfigError("unknown tokenize mode: " + s);
}

std::string to_string(Tokenize t) {
    return t == Tokenize::whitespace_punct ? "whitespace_punct" : "char";
}

namespace {

std::vector<std::string> bleu_tokens(const std::string& s, Tokenize mode) {
    return mode == Tokenize::whitespace_punct ? text::tokenize_whitespace_punct(s)
                                              : text::tokenize_chars(s);
}

// n-grams keyed by their tokens joined with an unlikely separator byte
void count_ngrams(const std::vector<std::string>& toks, std::size_t n,
                  std::unordered_map<std::string, long>& out) {
    if (toks.size() < n) return;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        std::string key;
        for (std::size_t j = 0; j < n; ++j) {
            if (j) key += '\x1f';
            key += toks[i + j];
        }
        ++out[key];
    }
}

}  // namespace

double corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                   Tokenize tokenize) {
    if (hyps.empty()) throw MetricError("corpus bleu needs at least one segment");
    if (hyps.size() != refs.size())
        throw MetricError("corpus bleu: hypothesis/reference count mismatch");

    constexpr std::size_t kMaxOrder = 4;
    long clipped[kMaxOrder] = {0, 0, 0, 0};
    long total[kMaxOrder] = {0, 0, 0, 0};
    long hyp_len = 0;
    long ref_len = 0;

    for (std::size_t s = 0; s < hyps.size(); ++s) {
        const auto hyp_toks = bleu_tokens(hyps[s], tokenize);
        const auto ref_toks = bleu_tokens(refs[s], tokenize);
        hyp_len += static_cast<long>(hyp_toks.size());
        ref_len += static_cast<long>(ref_toks.size());
        for (std::size_t n = 1; n <= kMaxOrder; ++n) {
            std::unordered_map<std::string, long> hyp_counts, ref_counts;
            count_ngrams(hyp_toks, n, hyp_counts);
            count_ngrams(ref_toks, n, ref_counts);
            for (const auto& [gram, count] : hyp_counts) {
                total[n - 1] += count;
                auto it = ref_counts.find(gram);
                if (it != ref_counts.end()) clipped[n - 1] += std::min(count, it->second);
            }
        }
    }

    if (hyp_len == 0) return 0.0;

    // Orders the corpus is too short to populate carry no signal and are
    // skipped; a populated order with zero matches zeroes the score.
    double log_sum = 0.0;
    std::size_t orders = 0;
    for (std::size_t n = 0; n < kMaxOrder; ++n) {
        if (total[n] == 0) continue;
        if (clipped[n] == 0) return 0.0;
        log_sum += std::log(static_cast<double>(clipped[n]) / static_cast<double>(total[n]));
        ++orders;
    }
    const double precision = orders ? std::exp(log_sum / static_cast<double>(orders)) : 0.0;
    const double bp =
        hyp_len >= ref_len
            ? 1.0
            : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    return 100.0 * bp * precision;
}

std::vector<std::pair<std::size_t, std::size_t>> Segmentation::pieces(std::size_t hyp_len) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    for (std::size_t b : boundaries) {
        out.emplace_back(start, b);
        start = b;
    }
    out.emplace_back(start, hyp_len);
    return out;
}

namespace {

constexpr long kInf = std::numeric_limits<long>::max() / 4;

// lev(hyp[start..end), ref) for every end in [start..H], one row at a time.
// visit(end, cost) is called in increasing end order.
template <typename Visit>
void levenshtein_sweep(const std::vector<std::string>& hyp, std::size_t start,
                       const std::vector<std::string>& ref, Visit&& visit) {
    const std::size_t m = ref.size();
    std::vector<long> row(m + 1);
    for (std::size_t j = 0; j <= m; ++j) row[j] = static_cast<long>(j);
    visit(start, row[m]);
    std::vector<long> next(m + 1);
    for (std::size_t end = start + 1; end <= hyp.size(); ++end) {
        const std::string& w = hyp[end - 1];
        next[0] = row[0] + 1;
        for (std::size_t j = 1; j <= m; ++j) {
            const long sub = row[j - 1] + (w == ref[j - 1] ? 0 : 1);
            next[j] = std::min({row[j] + 1, next[j - 1] + 1, sub});
        }
        row.swap(next);
        visit(end, row[m]);
    }
}

}  // namespace

Segmentation mwer_segment(const std::vector<std::string>& hyp_words,
                          const std::vector<std::string>& ref_sentences) {
    if (ref_sentences.empty()) throw MetricError("resegmentation needs at least one reference");

    const std::size_t h_len = hyp_words.size();
    const std::size_t r_len = ref_sentences.size();

    std::vector<std::string> hyp_lc;
    hyp_lc.reserve(h_len);
    for (const auto& w : hyp_words) hyp_lc.push_back(text::lower_ascii(w));
    std::vector<std::vector<std::string>> ref_lc(r_len);
    for (std::size_t r = 0; r < r_len; ++r) {
        for (const auto& w : text::split_words(ref_sentences[r]))
            ref_lc[r].push_back(text::lower_ascii(w));
    }

    // suffix[r][h]: minimum cost of matching references r..R-1 against
    // hyp[h..H). suffix[R][h] forces the last piece to reach the end.
    std::vector<std::vector<long>> suffix(r_len + 1, std::vector<long>(h_len + 1, kInf));
    suffix[r_len][h_len] = 0;
    for (std::size_t r = r_len; r-- > 0;) {
        for (std::size_t h = 0; h <= h_len; ++h) {
            long best = kInf;
            levenshtein_sweep(hyp_lc, h, ref_lc[r], [&](std::size_t end, long cost) {
                if (suffix[r + 1][end] < kInf) best = std::min(best, cost + suffix[r + 1][end]);
            });
            suffix[r][h] = best;
        }
    }

    Segmentation seg;
    seg.total_edit_distance = suffix[0][0];

    // Walk left to right taking the earliest boundary that preserves the
    // optimum; this makes ties deterministic.
    std::size_t cur = 0;
    for (std::size_t r = 0; r + 1 < r_len; ++r) {
        std::size_t chosen = h_len;
        bool found = false;
        levenshtein_sweep(hyp_lc, cur, ref_lc[r], [&](std::size_t end, long cost) {
            if (!found && suffix[r + 1][end] < kInf && cost + suffix[r + 1][end] == suffix[r][cur]) {
                chosen = end;
                found = true;
            }
        });
        seg.boundaries.push_back(chosen);
        cur = chosen;
    }
    return seg;
}

StreamLatencyReport stream_laal(const EmissionLog& doc_log, const std::vector<SpanRef>& spans) {
    if (spans.empty()) throw MetricError("stream laal needs sentence spans");

    std::vector<std::string> hyp_words;
    hyp_words.reserve(doc_log.items.size());
    for (const auto& item : doc_log.items) hyp_words.push_back(item.word);
    std::vector<std::string> refs;
    refs.reserve(spans.size());
    for (const auto& span : spans) refs.push_back(span.ref);

    const Segmentation seg = mwer_segment(hyp_words, refs);
    const auto pieces = seg.pieces(hyp_words.size());

    StreamLatencyReport report;
    double sum = 0.0;
    for (std::size_t r = 0; r < spans.size(); ++r) {
        SentenceLatency sentence;
        sentence.index = r;
        const auto [begin, end] = pieces[r];
        if (begin == end) {
            sentence.skipped = true;
            report.skipped += 1;
        } else {
            EmissionLog piece_log;
            piece_log.source_duration_ms = spans[r].end_ms - spans[r].start_ms;
            for (std::size_t i = begin; i < end; ++i)
                piece_log.items.push_back(
                    {doc_log.items[i].word, doc_log.items[i].emit_ms - spans[r].start_ms});
            sentence.report =
                average_lagging(piece_log, text::word_count(spans[r].ref));
            sum += sentence.report.laal_ms;
            report.evaluated += 1;
        }
        report.sentences.push_back(std::move(sentence));
    }
    report.mean_laal_ms = report.evaluated ? sum / static_cast<double>(report.evaluated) : 0.0;
    return report;
}

RunSummary run_summary_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("bad run summary: ") + e.what());
    }
    RunSummary s;
    s.source_id = j.at("source_id").get<std::string>();
    s.policy = j.at("policy").get<std::string>();
    s.k = j.at("k").get<int>();
    s.chunk_ms = j.at("chunk_ms").get<std::int64_t>();
    s.task = j.value("task", "simulst");
    s.duration_ms = j.at("duration_ms").get<std::int64_t>();
    s.hypothesis = j.at("hypothesis").get<std::string>();
    s.emissions.source_duration_ms = s.duration_ms;
    for (const auto& e : j.at("emissions"))
        s.emissions.items.push_back(
            {e.at("word").get<std::string>(), e.at("ms").get<std::int64_t>()});
    return s;
}

EvalMode eval_mode_from_string(const std::string& s) {
    if (s == "sentence") return EvalMode::sentence;
    if (s == "stream") return EvalMode::stream;
    throw ConfigError("unknown eval mode: " + s);
}

QualityReport quality_report(const std::vector<RunSummary>& summaries,
                             const std::vector<std::pair<std::string, RefEntry>>& refs,
                             EvalMode mode, Tokenize tokenize) {
    if (summaries.empty()) throw MetricError("no run summaries to evaluate");
    std::map<std::string, const RefEntry*> ref_map;
    for (const auto& [id, entry] : refs) ref_map[id] = &entry;

    const std::string want_task = mode == EvalMode::sentence ? "simulst" : "streamst";
    std::map<std::tuple<std::string, std::int64_t, int>, std::vector<const RunSummary*>> groups;
    for (const auto& s : summaries) {
        if (s.task != want_task)
            throw MetricError("mode/task mismatch: run is " + s.task + ", eval wants " + want_task);
        if (!ref_map.count(s.source_id))
            throw MetricError("missing reference for " + s.source_id);
        groups[{s.policy, s.chunk_ms, s.k}].push_back(&s);
    }

    QualityReport report;
    for (const auto& [key, runs] : groups) {
        CurveRow row;
        row.policy = std::get<0>(key);
        row.chunk_ms = std::get<1>(key);
        row.k = std::get<2>(key);

        std::vector<std::string> hyps, ref_texts;
        if (mode == EvalMode::sentence) {
            double al_sum = 0.0, laal_sum = 0.0;
            for (const RunSummary* run : runs) {
                const RefEntry& ref = *ref_map.at(run->source_id);
                hyps.push_back(run->hypothesis);
                ref_texts.push_back(ref.ref_text);
                const auto latency =
                    average_lagging(run->emissions, text::word_count(ref.ref_text));
                al_sum += latency.al_ms;
                laal_sum += latency.laal_ms;
            }
            row.al_ms = al_sum / static_cast<double>(runs.size());
            row.laal_ms = laal_sum / static_cast<double>(runs.size());
        } else {
            double laal_sum = 0.0;
            for (const RunSummary* run : runs) {
                const RefEntry& ref = *ref_map.at(run->source_id);
                if (ref.spans.empty())
                    throw MetricError("missing sentence spans for " + run->source_id);
                const auto stream_report = stream_laal(run->emissions, ref.spans);
                laal_sum += stream_report.mean_laal_ms;

                std::vector<std::string> hyp_words;
                for (const auto& item : run->emissions.items) hyp_words.push_back(item.word);
                std::vector<std::string> sentence_refs;
                for (const auto& span : ref.spans) sentence_refs.push_back(span.ref);
                const auto seg = mwer_segment(hyp_words, sentence_refs);
                const auto pieces = seg.pieces(hyp_words.size());
                for (std::size_t r = 0; r < pieces.size(); ++r) {
                    std::vector<std::string> piece(
                        hyp_words.begin() + static_cast<long>(pieces[r].first),
                        hyp_words.begin() + static_cast<long>(pieces[r].second));
                    hyps.push_back(text::join(piece));
                    ref_texts.push_back(sentence_refs[r]);
                }
            }
            row.stream_laal_ms = laal_sum / static_cast<double>(runs.size());
        }
        row.bleu = corpus_bleu(hyps, ref_texts, tokenize);
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

std::string fixed(double v, int digits) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(digits);
    out << v;
    return out.str();
}

}  // namespace

std::string quality_report_csv(const QualityReport& report) {
    std::string csv = "policy,k,chunk_ms,bleu,al_ms,laal_ms,stream_laal_ms\n";
    for (const auto& row : report.rows) {
        csv += row.policy + ',' + std::to_string(row.k) + ',' + std::to_string(row.chunk_ms) + ',';
        csv += fixed(row.bleu, 4);
        csv += ',';
        if (row.al_ms) csv += fixed(*row.al_ms, 3);
        csv += ',';
        if (row.laal_ms) csv += fixed(*row.laal_ms, 3);
        csv += ',';
        if (row.stream_laal_ms) csv += fixed(*row.stream_laal_ms, 3);
        csv += '\n';
    }
    return csv;
}

std::string quality_report_json(const QualityReport& report) {
    json rows = json::array();
    for (const auto& row : report.rows) {
        json r = {{"policy", row.policy},
                  {"k", row.k},
                  {"chunk_ms", row.chunk_ms},
                  {"bleu", row.bleu}};
        if (row.al_ms) r["al_ms"] = *row.al_ms;
        if (row.laal_ms) r["laal_ms"] = *row.laal_ms;
        if (row.stream_laal_ms) r["stream_laal_ms"] = *row.stream_laal_ms;
        rows.push_back(std::move(r));
    }
    return json{{"rows", rows}}.dump(2);
}

}  // namespace streamst::metrics
