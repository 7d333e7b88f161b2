#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace streamst {

// One fixed-duration slice of the source signal. Payload is raw audio bytes,
// empty in scripted mode.
struct Chunk {
    int index = 0;  // 1-based, consecutive within a stream
    std::int64_t duration_ms = 0;
    std::string payload;
};

struct SpeechStream {
    std::string source_id;
    std::int64_t chunk_ms = 0;
    std::vector<Chunk> chunks;

    int total_chunks() const { return static_cast<int>(chunks.size()); }
    std::int64_t duration_ms() const { return total_chunks() * chunk_ms; }
};

// A timestamped word sequence. Timestamps are optional: remote services
// usually return plain text.
struct TranscriptWord {
    std::string token;
    std::optional<std::int64_t> end_ms;
};

struct Transcription {
    std::string text;
    std::vector<TranscriptWord> words;

    static Transcription from_text(std::string text);

    // Number of whitespace-delimited tokens; punctuation stays attached.
    int word_count() const { return static_cast<int>(words.size()); }
    bool empty() const;
};

enum class PolicyKind { streamuni, wait_k };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& s);

struct PolicyConfig {
    int k = 3;                      // lag in words, >= 1
    std::int64_t chunk_ms = 640;
    int max_segment_chunks = 30;    // forced-truncation threshold
    int stability_window = 3;       // identical transcriptions needed, incl. the current one
    std::string terminal_punct = ".?!;";
    PolicyKind policy_kind = PolicyKind::streamuni;
    std::string prompt_template =
        "Transcribe the audio to text, and then translate the audio to {target_lang}. "
        "Use <sep> as a separator between the original transcript and the translation";
    std::string target_lang = "English";
    bool wall_clock = false;  // add measured backend latency to event times

    // Throws ConfigError on violation.
    void validate() const;

    std::string prompt() const;
};

// One emitted target word with its absolute emission time.
struct EmittedWord {
    std::string word;
    int emit_chunk = 0;
    std::int64_t emit_ms = 0;

    bool operator==(const EmittedWord&) const = default;
};

enum class TruncationRule { stability, sentence, forced, end_of_stream };

std::string to_string(TruncationRule rule);
TruncationRule truncation_rule_from_string(const std::string& s);

// --- event trace -----------------------------------------------------------
//
// The trace is the engine's externally visible output: applying the events to
// a fresh session reconstructs the final state exactly. Each event carries
// the tick time in ms.

struct ReadChunkEvent {
    int chunk = 0;
    std::int64_t ms = 0;
    std::string transcription;  // x^(n) for this tick
};

struct EmitWordsEvent {
    int chunk = 0;
    std::int64_t ms = 0;
    std::vector<std::string> words;
};

struct TruncateEvent {
    int chunk = 0;  // tick at which the truncation was decided
    std::int64_t ms = 0;
    TruncationRule rule = TruncationRule::stability;
    int a_new = 0;  // chunk index closing the segment
    long b_new = 0;  // absolute count of target words discarded after this truncation
};

// Re-transcription of one residual chunk after a sentence truncation.
struct RecomputeEvent {
    int chunk = 0;  // the chunk index whose prefix transcription this is
    std::int64_t ms = 0;
    std::string transcription;
};

using Event = std::variant<ReadChunkEvent, EmitWordsEvent, TruncateEvent, RecomputeEvent>;

// --- session state ----------------------------------------------------------

struct StreamMeta {
    std::string source_id;
    std::int64_t chunk_ms = 0;
    int total_chunks = 0;
};

// Anchors are absolute document counters; per-segment views are derived.
struct SessionState {
    int seg_start = 0;        // a_m: chunk index of the last truncation
    long trans_anchor = 0;    // b_m: target words discarded so far
    std::vector<Transcription> queue;  // x^(a_m+1) .. x^(n-1) between ticks
    std::vector<EmittedWord> emitted;  // current segment only; cleared at truncation
    int current_chunk = 0;    // n
    int segments_closed = 0;  // M
    StreamMeta meta;

    bool same_state(const SessionState& other) const;
};

// Per-target-word emission times feeding AL/LAAL/StreamLAAL.
struct EmissionItem {
    std::string word;
    std::int64_t emit_ms = 0;
};

struct EmissionLog {
    std::vector<EmissionItem> items;
    std::int64_t source_duration_ms = 0;  // T
};

struct SegmentRecord {
    int a = 0;      // closing chunk index
    long b = 0;     // absolute target-word count after the flush
    TruncationRule rule = TruncationRule::stability;
};

}  // namespace streamst
