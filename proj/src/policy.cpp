#include "streamst/policy.hpp"

#include <algorithm>
#include <chrono>

#include <json.hpp>

#include "streamst/errors.hpp"
#include "streamst/text.hpp"
#include "streamst/trace.hpp"

namespace streamst {

namespace {

bool ends_with_terminal_punct(const std::string& trimmed, const std::string& punct_set) {
    return !trimmed.empty() && punct_set.find(trimmed.back()) != std::string::npos;
}

std::string committed_text(const SessionState& state) {
    std::vector<std::string> words;
    words.reserve(state.emitted.size());
    for (const auto& e : state.emitted) words.push_back(e.word);
    return text::join(words);
}

BackendRequest base_request(const SessionState& state, const SpeechStream* stream, int seg_start,
                            int end_chunk, const PolicyConfig& config) {
    BackendRequest req;
    req.source_id = state.meta.source_id;
    req.chunk_ms = config.chunk_ms;
    req.window_start_ms = static_cast<std::int64_t>(seg_start) * config.chunk_ms;
    req.window_end_ms = static_cast<std::int64_t>(end_chunk) * config.chunk_ms;
    req.prompt = config.prompt();
    if (stream)
        for (int c = seg_start + 1; c <= end_chunk; ++c) {
            const auto& payload = stream->chunks[static_cast<std::size_t>(c - 1)].payload;
            if (!payload.empty()) req.payloads.push_back(payload);
        }
    return req;
}

// Measures backend latency for the optional wall-clock mode.
class TickClock {
public:
    explicit TickClock(bool enabled) : enabled_(enabled) {}

    template <typename F>
    auto timed(F&& f) {
        if (!enabled_) return f();
        const auto start = std::chrono::steady_clock::now();
        auto result = f();
        elapsed_ms_ += std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
        return result;
    }

    std::int64_t offset() const { return elapsed_ms_; }

private:
    bool enabled_;
    std::int64_t elapsed_ms_ = 0;
};

struct EngineTick {
    const SessionState& state;
    Backend& backend;
    const PolicyConfig& config;
    const SpeechStream* stream;  // payload source; null when chunks carry none
    int n;
    TickClock clock;

    EngineTick(const SessionState& s, Backend& b, const PolicyConfig& c, const SpeechStream* st,
               int chunk_index)
        : state(s), backend(b), config(c), stream(st), n(chunk_index),
          clock(config.wall_clock) {}

    std::int64_t now() const {
        return static_cast<std::int64_t>(n) * config.chunk_ms + clock.offset();
    }

    Transcription transcribe(int seg_start, int end_chunk) {
        BackendRequest req = base_request(state, stream, seg_start, end_chunk, config);
        req.mode = RequestMode::transcribe;
        return clock.timed([&] { return backend.transcribe(req); });
    }

    std::vector<std::string> translate(RequestMode mode, int seg_start, int end_chunk,
                                       const std::string& transcription,
                                       const std::string& committed, int max_words) {
        BackendRequest req = base_request(state, stream, seg_start, end_chunk, config);
        req.mode = mode;
        req.transcription = transcription;
        req.committed = committed;
        req.max_words = max_words;
        return clock.timed([&] { return backend.translate(req); });
    }
};

// Bounded generation for the open segment; appends an emit event when the
// backend returns anything.
void generation_step(EngineTick& tick, std::vector<Event>& events, int seg_start,
                     const Transcription& x_n, const std::string& committed, int already,
                     int override_allowed = -1) {
    const int allowed = override_allowed >= 0
                            ? override_allowed
                            : allowed_output_count(x_n.word_count(), tick.config.k, already);
    if (allowed <= 0) return;
    auto words = tick.translate(RequestMode::translate_bounded, seg_start, tick.n, x_n.text,
                                committed, allowed);
    if (static_cast<int>(words.size()) > allowed) words.resize(static_cast<std::size_t>(allowed));
    if (!words.empty()) events.push_back(EmitWordsEvent{tick.n, tick.now(), std::move(words)});
}

}  // namespace

TruncationDecision check_truncation(const std::vector<Transcription>& queue,
                                    const Transcription& x_n, int n, int seg_start,
                                    const PolicyConfig& config) {
    const std::string current = text::trim(x_n.text);

    // Rule 1: transcription unchanged across the stability window.
    const std::size_t needed = static_cast<std::size_t>(config.stability_window - 1);
    if (queue.size() >= needed) {
        bool stable = true;
        for (std::size_t i = queue.size() - needed; i < queue.size(); ++i)
            if (text::trim(queue[i].text) != current) {
                stable = false;
                break;
            }
        if (stable) return {true, TruncationRule::stability, n, false};
    }

    // Rule 2: a finished sentence followed by new material; prefer the later
    // cut point l = n-1 over l = n-2.
    for (int back = 1; back <= 2; ++back) {
        if (static_cast<int>(queue.size()) < back) break;
        const std::string candidate = text::trim(queue[queue.size() - static_cast<std::size_t>(back)].text);
        if (candidate.empty()) continue;
        if (!ends_with_terminal_punct(candidate, config.terminal_punct)) continue;
        if (!text::is_strict_prefix(candidate, current)) continue;
        return {true, TruncationRule::sentence, n - back, true};
    }

    if (n - seg_start >= config.max_segment_chunks) return {true, TruncationRule::forced, n, false};
    return {false, TruncationRule::stability, 0, false};
}

int allowed_output_count(int transcript_words, int k, int already_emitted) {
    return std::max(0, transcript_words - k - already_emitted);
}

namespace {

StepResult step_unwrapped(const SessionState& state, const Chunk& chunk, Backend& backend,
                          const PolicyConfig& config, const SpeechStream* stream) {
    EngineTick tick(state, backend, config, stream, chunk.index);
    const int n = chunk.index;
    const int a_m = state.seg_start;

    std::vector<Event> events;
    const Transcription x_n = tick.transcribe(a_m, n);
    events.push_back(ReadChunkEvent{n, tick.now(), x_n.text});

    if (config.policy_kind == PolicyKind::wait_k) {
        // Fixed schedule: one bounded word per chunk once k-1 chunks passed.
        if (n >= config.k)
            generation_step(tick, events, a_m, x_n, committed_text(state),
                            static_cast<int>(state.emitted.size()), 1);
    } else {
        const TruncationDecision decision =
            check_truncation(state.queue, x_n, n, a_m, config);
        if (decision.triggered) {
            // Transcription of the segment being closed: for the sentence rule
            // the cut is at an earlier chunk, whose transcription sits in the
            // queue; otherwise it is this tick's x_n.
            const std::string closing_text =
                decision.a_new == n
                    ? x_n.text
                    : state.queue[state.queue.size() -
                                  static_cast<std::size_t>(n - decision.a_new)]
                          .text;
            auto flushed = tick.translate(RequestMode::translate_flush, a_m, decision.a_new,
                                          closing_text, committed_text(state), 0);
            const long b_new = state.trans_anchor + static_cast<long>(state.emitted.size()) +
                               static_cast<long>(flushed.size());
            if (!flushed.empty())
                events.push_back(EmitWordsEvent{n, tick.now(), std::move(flushed)});
            events.push_back(TruncateEvent{n, tick.now(), decision.rule, decision.a_new, b_new});

            if (decision.requires_retranscription) {
                // Rebuild the queue for the residual chunks one prefix at a
                // time, then give the fresh segment its generation step.
                Transcription x_new;
                for (int l = decision.a_new + 1; l <= n; ++l) {
                    x_new = tick.transcribe(decision.a_new, l);
                    events.push_back(RecomputeEvent{l, tick.now(), x_new.text});
                }
                generation_step(tick, events, decision.a_new, x_new, "", 0);
            }
        } else {
            generation_step(tick, events, a_m, x_n, committed_text(state),
                            static_cast<int>(state.emitted.size()));
        }
    }

    StepResult result{state, {}};
    for (auto& event : events) apply_event(result.state, event);
    result.events = std::move(events);
    return result;
}

// All failures leave the caller's state untouched and name the chunk.
StepResult step_impl(const SessionState& state, const Chunk& chunk, Backend& backend,
                     const PolicyConfig& config, const SpeechStream* stream) {
    if (chunk.index != state.current_chunk + 1)
        throw EngineError("chunk index out of order", chunk.index);
    try {
        return step_unwrapped(state, chunk, backend, config, stream);
    } catch (const EngineError&) {
        throw;
    } catch (const Error& e) {
        throw EngineError(e.what(), chunk.index);
    }
}

RunResult run_impl(const SpeechStream& stream, Backend& backend, const PolicyConfig& config) {
    config.validate();
    if (stream.chunks.empty()) throw ConfigError("empty stream: " + stream.source_id);

    RunResult result;
    result.final_state = new_session(
        config, StreamMeta{stream.source_id, config.chunk_ms, stream.total_chunks()});

    for (const auto& chunk : stream.chunks) {
        StepResult sr;
        try {
            sr = step_impl(result.final_state, chunk, backend, config, &stream);
        } catch (const EngineError& e) {
            throw RunError(e.what(), e.chunk(), result.trace);
        }
        result.final_state = std::move(sr.state);
        result.trace.insert(result.trace.end(), sr.events.begin(), sr.events.end());
    }

    // Close whatever is still open with a final flush.
    const int last = stream.total_chunks();
    SessionState& state = result.final_state;
    if (state.seg_start < last) {
        EngineTick tick(state, backend, config, &stream, last);
        std::vector<Event> events;
        try {
            const std::string closing_text =
                state.queue.empty() ? std::string{} : state.queue.back().text;
            auto flushed = tick.translate(RequestMode::translate_flush, state.seg_start, last,
                                          closing_text, committed_text(state), 0);
            const long b_new = state.trans_anchor + static_cast<long>(state.emitted.size()) +
                               static_cast<long>(flushed.size());
            if (!flushed.empty())
                events.push_back(EmitWordsEvent{last, tick.now(), std::move(flushed)});
            events.push_back(
                TruncateEvent{last, tick.now(), TruncationRule::end_of_stream, last, b_new});
        } catch (const Error& e) {
            throw RunError("chunk " + std::to_string(last) + ": " + e.what(), last, result.trace);
        }
        for (auto& event : events) apply_event(state, event);
        result.trace.insert(result.trace.end(), events.begin(), events.end());
    }

    // Derive document outputs from the trace.
    result.hypothesis = trace_hypothesis(result.trace);
    result.emissions = trace_emissions(result.trace, stream.duration_ms());
    result.segments = trace_segments(result.trace);
    return result;
}

}  // namespace

StepResult step(const SessionState& state, const Chunk& chunk, Backend& backend,
                const PolicyConfig& config) {
    return step_impl(state, chunk, backend, config, nullptr);
}

RunResult run_stream(const SpeechStream& stream, Backend& backend, const PolicyConfig& config) {
    return run_impl(stream, backend, config);
}

RunResult wait_k_policy(const SpeechStream& stream, Backend& backend, const PolicyConfig& config) {
    if (config.policy_kind != PolicyKind::wait_k)
        throw ConfigError("wait_k_policy requires policy_kind wait_k");
    return run_impl(stream, backend, config);
}

std::string run_summary_json(const RunResult& result, const PolicyConfig& config,
                             const std::string& source_id, const std::string& task) {
    nlohmann::json emissions = nlohmann::json::array();
    for (const auto& item : result.emissions.items)
        emissions.push_back({{"word", item.word}, {"ms", item.emit_ms}});
    nlohmann::json segments = nlohmann::json::array();
    for (const auto& seg : result.segments)
        segments.push_back({{"a", seg.a}, {"b", seg.b}, {"rule", to_string(seg.rule)}});
    nlohmann::json j = {{"source_id", source_id},
                        {"policy", to_string(config.policy_kind)},
                        {"k", config.k},
                        {"chunk_ms", config.chunk_ms},
                        {"task", task},
                        {"duration_ms", result.emissions.source_duration_ms},
                        {"hypothesis", result.hypothesis},
                        {"emissions", emissions},
                        {"segments", segments}};
    return j.dump(2);
}

}  // namespace streamst
