#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "streamst/fixture.hpp"

namespace streamst::cot {

// splitmix64 step: advances the state and returns the next value. Fixed-width
// arithmetic only, so sequences are identical across platforms.
std::uint64_t splitmix64(std::uint64_t& state);

// Unbiased draw from {0..n-1} by rejection sampling over splitmix64.
std::uint64_t uniform_below(std::uint64_t& state, std::uint64_t n);

// Per-source seed derived from the run seed and the source id (FNV-1a), so
// adding or removing fixtures never shifts the draws of the others.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view source_id);

// Uniform truncation point in {1..total_chunks}. Deterministic per seed.
// Throws ConfigError on a zero-length stream.
std::size_t sample_truncation(const Fixture& fixture, std::uint64_t seed);

// Source words fully heard by t_ms, joined with single spaces. Always a
// string prefix of the fixture transcript; empty when nothing finished yet.
std::string partial_transcript(const Fixture& fixture, std::int64_t t_ms);

enum class CotKind { streaming, non_streaming };

std::string to_string(CotKind kind);

struct CotExample {
    std::string source_id;
    CotKind kind = CotKind::streaming;
    std::size_t truncate_chunk = 0;  // i, 1-based; = total chunks for non-streaming
    std::int64_t truncate_ms = 0;
    std::string partial_transcript;
    std::string full_translation;  // never truncated, whatever the prefix
    std::string prompt;

    std::string to_json_line() const;
};

struct CotRecipe {
    double streaming_hours_ratio = 0.5;  // share of audio duration, in [0, 1]
};

// One example per fixture, ordered by source_id. Kinds are assigned greedily
// so the cumulative streaming audio share tracks the requested ratio; ties
// favor streaming. Output is byte-stable for a given (manifest, recipe, seed).
std::vector<CotExample> build_dataset(const FixtureStore& store, const CotRecipe& recipe,
                                      std::uint64_t seed);

std::string dataset_to_jsonl(const std::vector<CotExample>& examples);

}  // namespace streamst::cot
