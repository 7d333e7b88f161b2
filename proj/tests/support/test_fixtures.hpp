#pragma once

// Fixture builders and fake backends shared by the unit and acceptance
// suites. Everything here is deterministic given the caller's RNG.

#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "streamst/backend.hpp"
#include "streamst/fixture.hpp"
#include "streamst/text.hpp"
#include "streamst/types.hpp"

namespace testsupport {

// One source word per chunk, word i ending exactly at i*chunk_ms. Targets
// mirror the sources one-to-one (identity alignment), no punctuation, so no
// truncation rule can fire before the end of stream.
inline streamst::Fixture one_word_per_chunk(const std::string& id, int words,
                                            std::int64_t chunk_ms) {
    streamst::Fixture f;
    f.source_id = id;
    f.chunk_ms = chunk_ms;
    for (int i = 1; i <= words; ++i) {
        const std::int64_t end = i * chunk_ms;
        f.src_words.push_back({"s" + std::to_string(i), end - chunk_ms / 2, end});
        f.ref_translation_words.push_back("t" + std::to_string(i));
        f.alignment.push_back(i);
    }
    std::vector<std::string> toks;
    for (const auto& w : f.src_words) toks.push_back(w.token);
    f.transcript = streamst::text::join(toks);
    f.validate();
    return f;
}

// Two sentences, one word per chunk, the last word of each carrying a
// terminal '.'. Targets align one-to-one, so the first segment's eligible
// target set is exactly the first sentence.
inline streamst::Fixture two_sentences(const std::string& id, int s1_words, int s2_words,
                                       std::int64_t chunk_ms) {
    streamst::Fixture f;
    f.source_id = id;
    f.chunk_ms = chunk_ms;
    std::vector<std::string> tgt1, tgt2;
    const int total = s1_words + s2_words;
    for (int i = 1; i <= total; ++i) {
        const bool sentence_end = i == s1_words || i == total;
        const std::string src = (i <= s1_words ? "a" : "b") + std::to_string(i) +
                                (sentence_end ? "." : "");
        const std::string tgt = (i <= s1_words ? "x" : "y") + std::to_string(i) +
                                (sentence_end ? "." : "");
        const std::int64_t end = i * chunk_ms;
        f.src_words.push_back({src, end - chunk_ms / 2, end});
        f.ref_translation_words.push_back(tgt);
        f.alignment.push_back(i);
        (i <= s1_words ? tgt1 : tgt2).push_back(tgt);
    }
    std::vector<std::string> toks;
    for (const auto& w : f.src_words) toks.push_back(w.token);
    f.transcript = streamst::text::join(toks);
    f.sentence_spans.push_back({0, s1_words * chunk_ms, streamst::text::join(tgt1)});
    f.sentence_spans.push_back(
        {s1_words * chunk_ms, total * chunk_ms, streamst::text::join(tgt2)});
    f.validate();
    return f;
}

// Random single-sentence fixture with 1..3 words per chunk (never a silent
// chunk, so neither stability nor sentence truncation can fire) and a random
// monotone alignment. chunks stays under the forced-truncation threshold.
inline streamst::Fixture random_fixture(std::mt19937_64& rng, const std::string& id) {
    std::uniform_int_distribution<int> chunks_dist(3, 12);
    std::uniform_int_distribution<std::int64_t> chunk_ms_dist(2, 8);
    const int chunks = chunks_dist(rng);
    const std::int64_t chunk_ms = 100 * chunk_ms_dist(rng);

    streamst::Fixture f;
    f.source_id = id;
    f.chunk_ms = chunk_ms;
    std::uniform_int_distribution<int> per_chunk(1, 3);
    int w = 0;
    for (int c = 1; c <= chunks; ++c) {
        const int here = per_chunk(rng);
        for (int i = 0; i < here; ++i) {
            ++w;
            // spread the word ends inside chunk c, strictly increasing
            const std::int64_t end = (c - 1) * chunk_ms + (i + 1) * chunk_ms / (here + 1) + 1;
            f.src_words.push_back({"s" + std::to_string(w), end - 1, end});
        }
    }
    const int src_count = static_cast<int>(f.src_words.size());
    std::uniform_int_distribution<int> tgt_dist(std::max(1, src_count - 2), src_count + 2);
    const int tgt_count = tgt_dist(rng);
    for (int j = 1; j <= tgt_count; ++j) f.ref_translation_words.push_back("t" + std::to_string(j));
    f.alignment = streamst::Fixture::proportional_alignment(src_count, tgt_count);
    std::vector<std::string> toks;
    for (const auto& word : f.src_words) toks.push_back(word.token);
    f.transcript = streamst::text::join(toks);
    f.duration_ms_field = chunks * chunk_ms;
    f.validate();
    return f;
}

inline streamst::SpeechStream empty_payload_stream(const std::string& id, int chunks,
                                                   std::int64_t chunk_ms) {
    streamst::SpeechStream stream;
    stream.source_id = id;
    stream.chunk_ms = chunk_ms;
    for (int i = 1; i <= chunks; ++i) stream.chunks.push_back({i, chunk_ms, ""});
    return stream;
}

// Backend with transcriptions scripted per (window_start_ms, window_end_ms)
// and translate responses served from a queue. Lets tests inject ASR jitter
// that the fixture-driven scripted backend (monotone by construction) cannot
// produce.
class SequenceBackend : public streamst::Backend {
public:
    std::map<std::pair<std::int64_t, std::int64_t>, std::string> transcripts;
    std::deque<std::vector<std::string>> translations;

    streamst::Transcription transcribe(const streamst::BackendRequest& req) override {
        const auto it = transcripts.find({req.window_start_ms, req.window_end_ms});
        if (it == transcripts.end())
            throw streamst::TransportError(
                "no scripted transcription for window (" +
                std::to_string(req.window_start_ms) + ", " +
                std::to_string(req.window_end_ms) + "]");
        return streamst::Transcription::from_text(it->second);
    }

    std::vector<std::string> translate(const streamst::BackendRequest& req) override {
        if (translations.empty()) return {};
        auto words = translations.front();
        translations.pop_front();
        if (req.mode == streamst::RequestMode::translate_bounded &&
            static_cast<int>(words.size()) > req.max_words)
            words.resize(static_cast<std::size_t>(req.max_words));
        return words;
    }
};

}  // namespace testsupport
