#include "streamst/trace.hpp"

#include <sstream>

#include <json.hpp>

#include "streamst/errors.hpp"
#include "streamst/text.hpp"

namespace streamst {

using nlohmann::json;

SessionState new_session(const PolicyConfig& config, const StreamMeta& meta) {
    config.validate();
    SessionState state;
    state.meta = meta;
    return state;
}

void apply_event(SessionState& state, const Event& event) {
    if (const auto* read = std::get_if<ReadChunkEvent>(&event)) {
        if (read->chunk != state.current_chunk + 1)
            throw TraceError("non-consecutive read_chunk: expected " +
                             std::to_string(state.current_chunk + 1) + ", got " +
                             std::to_string(read->chunk));
        state.current_chunk = read->chunk;
        state.queue.push_back(Transcription::from_text(read->transcription));
    } else if (const auto* emit = std::get_if<EmitWordsEvent>(&event)) {
        if (emit->chunk > state.current_chunk)
            throw TraceError("emit_words beyond current chunk");
        for (const auto& w : emit->words) state.emitted.push_back({w, emit->chunk, emit->ms});
    } else if (const auto* trunc = std::get_if<TruncateEvent>(&event)) {
        if (trunc->a_new > state.current_chunk)
            throw TraceError("truncate beyond current chunk " +
                             std::to_string(state.current_chunk));
        if (trunc->a_new <= state.seg_start) throw TraceError("truncation anchor must advance");
        if (trunc->b_new < state.trans_anchor) throw TraceError("target anchor must not retreat");
        state.seg_start = trunc->a_new;
        state.trans_anchor = trunc->b_new;
        state.queue.clear();
        state.emitted.clear();
        state.segments_closed += 1;
    } else if (const auto* rec = std::get_if<RecomputeEvent>(&event)) {
        if (rec->chunk <= state.seg_start || rec->chunk > state.current_chunk)
            throw TraceError("recompute outside the open segment");
        state.queue.push_back(Transcription::from_text(rec->transcription));
    }
}

SessionState replay(const std::vector<Event>& events, const PolicyConfig& config,
                    const StreamMeta& meta) {
    SessionState state = new_session(config, meta);
    for (const auto& event : events) apply_event(state, event);
    return state;
}

std::string event_to_json(const Event& event) {
    json j;
    if (const auto* read = std::get_if<ReadChunkEvent>(&event)) {
        j = {{"type", "read_chunk"},
             {"chunk", read->chunk},
             {"ms", read->ms},
             {"payload", read->transcription}};
    } else if (const auto* emit = std::get_if<EmitWordsEvent>(&event)) {
        j = {{"type", "emit_words"}, {"chunk", emit->chunk}, {"ms", emit->ms},
             {"payload", emit->words}};
    } else if (const auto* trunc = std::get_if<TruncateEvent>(&event)) {
        j = {{"type", "truncate"},
             {"chunk", trunc->chunk},
             {"ms", trunc->ms},
             {"payload",
              {{"rule", to_string(trunc->rule)}, {"a_new", trunc->a_new}, {"b_new", trunc->b_new}}}};
    } else if (const auto* rec = std::get_if<RecomputeEvent>(&event)) {
        j = {{"type", "recompute"}, {"chunk", rec->chunk}, {"ms", rec->ms},
             {"payload", rec->transcription}};
    }
    return j.dump();
}

Event event_from_json(const std::string& line) {
    try {
        const json j = json::parse(line);
        const std::string type = j.at("type").get<std::string>();
        const int chunk = j.at("chunk").get<int>();
        const std::int64_t ms = j.at("ms").get<std::int64_t>();
        if (type == "read_chunk")
            return ReadChunkEvent{chunk, ms, j.at("payload").get<std::string>()};
        if (type == "emit_words")
            return EmitWordsEvent{chunk, ms, j.at("payload").get<std::vector<std::string>>()};
        if (type == "truncate") {
            const json& p = j.at("payload");
            return TruncateEvent{chunk, ms,
                                 truncation_rule_from_string(p.at("rule").get<std::string>()),
                                 p.at("a_new").get<int>(), p.at("b_new").get<long>()};
        }
        if (type == "recompute")
            return RecomputeEvent{chunk, ms, j.at("payload").get<std::string>()};
        throw ParseError("unknown event type: " + type);
    } catch (const json::exception& e) {  // parse errors, missing keys, bad types
        throw ParseError(std::string("bad event json: ") + e.what());
    }
}

std::string trace_to_jsonl(const std::vector<Event>& events) {
    std::string out;
    for (const auto& e : events) {
        out += event_to_json(e);
        out += '\n';
    }
    return out;
}

std::vector<Event> trace_from_jsonl(const std::string& jsonl) {
    std::vector<Event> events;
    std::istringstream in(jsonl);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            events.push_back(event_from_json(line));
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return events;
}

int event_chunk(const Event& event) {
    return std::visit([](const auto& e) { return e.chunk; }, event);
}

std::int64_t event_ms(const Event& event) {
    return std::visit([](const auto& e) { return e.ms; }, event);
}

EmissionLog trace_emissions(const std::vector<Event>& events, std::int64_t source_duration_ms) {
    EmissionLog log;
    log.source_duration_ms = source_duration_ms;
    for (const auto& event : events)
        if (const auto* emit = std::get_if<EmitWordsEvent>(&event))
            for (const auto& w : emit->words) log.items.push_back({w, emit->ms});
    return log;
}

std::string trace_hypothesis(const std::vector<Event>& events) {
    std::vector<std::string> words;
    for (const auto& event : events)
        if (const auto* emit = std::get_if<EmitWordsEvent>(&event))
            words.insert(words.end(), emit->words.begin(), emit->words.end());
    return text::join(words);
}

std::vector<SegmentRecord> trace_segments(const std::vector<Event>& events) {
    std::vector<SegmentRecord> segments;
    for (const auto& event : events)
        if (const auto* trunc = std::get_if<TruncateEvent>(&event))
            segments.push_back({trunc->a_new, trunc->b_new, trunc->rule});
    return segments;
}

}  // namespace streamst
