#pragma once

#include <string>
#include <vector>

#include "streamst/backend.hpp"
#include "streamst/errors.hpp"
#include "streamst/types.hpp"

namespace streamst {

struct TruncationDecision {
    bool triggered = false;
    TruncationRule rule = TruncationRule::stability;
    int a_new = 0;
    bool requires_retranscription = false;  // sentence rule only
};

struct GenerationDecision {
    int allowed = 0;  // O
    int transcript_words = 0;
    int lag = 0;
    int already_emitted = 0;
};

// Per-chunk truncation decision over the historical transcription queue.
// The queue holds x^(a_m+1) .. x^(n-1); x_n is this tick's transcription.
//
// Rules, checked in order (first hit wins):
//   stability — the last stability_window-1 queue entries equal x_n after
//               whitespace trim (fires on identical empty transcriptions too:
//               that is the prolonged-silence truncation);
//   sentence  — for l = n-1 then l = n-2, x^(l) is nonempty, ends with
//               terminal punctuation, and is a strict prefix of x_n;
//   forced    — the open segment reached max_segment_chunks.
TruncationDecision check_truncation(const std::vector<Transcription>& queue,
                                    const Transcription& x_n, int n, int seg_start,
                                    const PolicyConfig& config);

// O = max(0, C - k - already_emitted). Clamped at zero: emitted words are
// never retracted when the transcript count drops.
int allowed_output_count(int transcript_words, int k, int already_emitted);

struct StepResult {
    SessionState state;
    std::vector<Event> events;
};

// Process one chunk: transcribe the open segment, decide truncation, then
// either flush the closed segment or run the lag-k generation step. A backend
// failure aborts the step with the input state unchanged.
StepResult step(const SessionState& state, const Chunk& chunk, Backend& backend,
                const PolicyConfig& config);

struct RunResult {
    std::vector<Event> trace;
    std::string hypothesis;
    EmissionLog emissions;
    std::vector<SegmentRecord> segments;
    SessionState final_state;
};

// Drive a whole stream through step(), closing the last segment with a final
// end-of-stream flush. Step errors propagate with the partial trace attached.
RunResult run_stream(const SpeechStream& stream, Backend& backend, const PolicyConfig& config);

// Fixed baseline: wait k-1 chunks, then request one continuation word per
// chunk; remainder flushed at end of stream. No mid-stream truncation.
RunResult wait_k_policy(const SpeechStream& stream, Backend& backend, const PolicyConfig& config);

// Engine failure carrying the partial trace accumulated before the bad chunk.
// The message already names the chunk.
class RunError : public Error {
public:
    RunError(const std::string& msg, int chunk, std::vector<Event> partial)
        : Error(msg), chunk_(chunk), partial_trace(std::move(partial)) {}
    int chunk() const { return chunk_; }
    std::vector<Event> partial_trace;

private:
    int chunk_;
};

// Summary JSON {hypothesis, emissions, segments, ...} written next to traces.
std::string run_summary_json(const RunResult& result, const PolicyConfig& config,
                             const std::string& source_id, const std::string& task);

}  // namespace streamst
