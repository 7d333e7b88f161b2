#pragma once

#include <string>
#include <vector>

#include "streamst/types.hpp"

namespace streamst {

SessionState new_session(const PolicyConfig& config, const StreamMeta& meta);

// Single source of truth for state transitions: the live engine and replay
// both go through here, so a trace reconstructs the live state by
// construction. Throws TraceError on inconsistent events.
void apply_event(SessionState& state, const Event& event);

SessionState replay(const std::vector<Event>& events, const PolicyConfig& config,
                    const StreamMeta& meta = {});

// Line-delimited JSON records {type, chunk, ms, payload}.
std::string event_to_json(const Event& event);
Event event_from_json(const std::string& line);

std::string trace_to_jsonl(const std::vector<Event>& events);
std::vector<Event> trace_from_jsonl(const std::string& jsonl);

int event_chunk(const Event& event);
std::int64_t event_ms(const Event& event);

// Document-level outputs reconstructed from a trace: every emitted word with
// its timestamp, their space-joined concatenation, and the closed segments.
EmissionLog trace_emissions(const std::vector<Event>& events,
                            std::int64_t source_duration_ms = 0);
std::string trace_hypothesis(const std::vector<Event>& events);
std::vector<SegmentRecord> trace_segments(const std::vector<Event>& events);

}  // namespace streamst
