#include "streamst/cot.hpp"

#include <cmath>

#include <json.hpp>

#include "streamst/errors.hpp"
#include "streamst/text.hpp"
#include "streamst/types.hpp"

namespace streamst::cot {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t uniform_below(std::uint64_t& state, std::uint64_t n) {
    if (n == 0) throw ConfigError("uniform_below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t x = splitmix64(state);
        if (x >= threshold) return x % n;
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view source_id) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : source_id) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h ^ seed;
}

std::size_t sample_truncation(const Fixture& fixture, std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(fixture.total_chunks(fixture.chunk_ms));
    if (n == 0) throw ConfigError("cannot sample a truncation of an empty stream: " +
                                  fixture.source_id);
    std::uint64_t state = seed;
    return static_cast<std::size_t>(uniform_below(state, n)) + 1;
}

std::string partial_transcript(const Fixture& fixture, std::int64_t t_ms) {
    std::vector<std::string> words;
    for (const auto& w : fixture.src_words) {
        if (w.end_ms > t_ms) break;
        words.push_back(w.token);
    }
    return text::join(words);
}

std::string to_string(CotKind kind) {
    return kind == CotKind::streaming ? "streaming" : "non_streaming";
}

std::string CotExample::to_json_line() const {
    nlohmann::ordered_json j;
    j["source_id"] = source_id;
    j["kind"] = to_string(kind);
    j["truncate_chunk"] = truncate_chunk;
    j["truncate_ms"] = truncate_ms;
    j["partial_transcript"] = partial_transcript;
    j["full_translation"] = full_translation;
    j["prompt"] = prompt;
    return j.dump();
}

std::vector<CotExample> build_dataset(const FixtureStore& store, const CotRecipe& recipe,
                                      std::uint64_t seed) {
    if (store.size() == 0) throw ConfigError("cot dataset needs at least one fixture");
    if (recipe.streaming_hours_ratio < 0.0 || recipe.streaming_hours_ratio > 1.0)
        throw ConfigError("streaming_hours_ratio must lie in [0, 1]");

    std::vector<CotExample> out;
    double streaming_ms = 0.0;
    double total_ms = 0.0;
    for (const auto& id : store.source_ids()) {
        const Fixture& fixture = store.get(id);
        const double dur = static_cast<double>(fixture.duration_ms());
        total_ms += dur;

        // Take the kind that leaves the cumulative streaming share closest to
        // the target; a tie goes to streaming so ratio 0.5 alternates.
        const double want = recipe.streaming_hours_ratio * total_ms;
        const bool streaming =
            std::abs(streaming_ms + dur - want) <= std::abs(streaming_ms - want);

        CotExample ex;
        ex.source_id = id;
        PolicyConfig prompt_config;
        prompt_config.target_lang = fixture.target_lang;
        ex.prompt = prompt_config.prompt();
        ex.full_translation = fixture.ref_translation_text();
        if (streaming) {
            streaming_ms += dur;
            ex.kind = CotKind::streaming;
            ex.truncate_chunk = sample_truncation(fixture, mix_seed(seed, id));
            ex.truncate_ms = static_cast<std::int64_t>(ex.truncate_chunk) * fixture.chunk_ms;
            ex.partial_transcript = partial_transcript(fixture, ex.truncate_ms);
        } else {
            ex.kind = CotKind::non_streaming;
            ex.truncate_chunk = static_cast<std::size_t>(fixture.total_chunks(fixture.chunk_ms));
            ex.truncate_ms = static_cast<std::int64_t>(ex.truncate_chunk) * fixture.chunk_ms;
            ex.partial_transcript = fixture.transcript;
        }
        out.push_back(std::move(ex));
    }
    return out;
}

std::string dataset_to_jsonl(const std::vector<CotExample>& examples) {
    std::string text;
    for (const auto& ex : examples) {
        text += ex.to_json_line();
        text += '\n';
    }
    return text;
}

}  // namespace streamst::cot
