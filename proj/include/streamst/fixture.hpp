#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "streamst/types.hpp"

namespace streamst {

struct SourceWord {
    std::string token;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
};

struct SentenceSpan {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    std::string ref;
};

// A pre-aligned dataset record: word-level source timestamps, transcript,
// reference translation and a monotone source-position alignment for each
// target word. Stands in for forced-aligned audio in scripted runs.
struct Fixture {
    std::string source_id;
    std::int64_t chunk_ms = 0;
    std::vector<SourceWord> src_words;
    std::string transcript;  // equals the joined src_words tokens
    std::vector<std::string> ref_translation_words;
    std::vector<int> alignment;  // a(j) in 1..|src_words|, nondecreasing
    std::vector<SentenceSpan> sentence_spans;
    std::optional<std::int64_t> duration_ms_field;  // explicit audio duration, if given
    std::string target_lang = "English";            // for prompt substitution

    // Total audio duration: the explicit field, else the last timestamp
    // rounded up to a whole chunk.
    std::int64_t duration_ms() const;
    int total_chunks(std::int64_t chunk) const;

    // Source words fully heard by t (end_ms <= t), counted from the document start.
    int src_words_heard(std::int64_t t_ms) const;
    // Largest target prefix whose aligned source words are all heard by t.
    int eligible_targets(std::int64_t t_ms) const;

    // Monotone total fallback when a fixture omits an alignment:
    // a(j) = ceil(j * |src| / |tgt|).
    static std::vector<int> proportional_alignment(int src_count, int tgt_count);

    void validate() const;  // throws ParseError with the offending field
    std::string ref_translation_text() const;
};

Fixture fixture_from_json(const std::string& json_text, const std::string& origin = "");
std::string fixture_to_json(const Fixture& fixture);
Fixture load_fixture(const std::filesystem::path& path);

// Manifests are JSONL: one fixture path per line, either a bare JSON string
// or {"path": ...}. Relative paths resolve against the manifest's directory.
std::vector<std::filesystem::path> load_manifest(const std::filesystem::path& path);

SpeechStream make_stream(const Fixture& fixture, std::int64_t chunk_ms);

// Immutable fixture collection shared by scripted backends and the stub
// server; safe for concurrent reads once built.
class FixtureStore {
public:
    FixtureStore() = default;

    void add(Fixture fixture);
    void load_manifest_file(const std::filesystem::path& manifest);

    const Fixture& get(const std::string& source_id) const;  // throws ConfigError if unknown
    bool contains(const std::string& source_id) const;
    std::vector<std::string> source_ids() const;  // sorted
    std::size_t size() const { return fixtures_.size(); }

private:
    std::map<std::string, Fixture> fixtures_;
};

}  // namespace streamst
