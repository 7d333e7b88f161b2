#include "streamst/types.hpp"

#include "streamst/errors.hpp"
#include "streamst/text.hpp"

namespace streamst {

Transcription Transcription::from_text(std::string text) {
    Transcription t;
    t.text = std::move(text);
    for (auto& tok : text::split_words(t.text)) t.words.push_back({std::move(tok), std::nullopt});
    return t;
}

bool Transcription::empty() const {
    return words.empty();
}

std::string to_string(PolicyKind kind) {
    return kind == PolicyKind::streamuni ? "streamuni" : "wait_k";
}

PolicyKind policy_kind_from_string(const std::string& s) {
    if (s == "streamuni") return PolicyKind::streamuni;
    if (s == "wait_k") return PolicyKind::wait_k;
    throw ConfigError("unknown policy kind: " + s);
}

void PolicyConfig::validate() const {
    if (k < 1) throw ConfigError("k must be >= 1, got " + std::to_string(k));
    if (chunk_ms <= 0) throw ConfigError("chunk_ms must be positive");
    if (terminal_punct.empty()) throw ConfigError("terminal punctuation set must not be empty");
    if (stability_window < 2) throw ConfigError("stability_window must be >= 2");
    if (max_segment_chunks < stability_window)
        throw ConfigError("max_segment_chunks must be >= stability_window");
}

std::string PolicyConfig::prompt() const {
    std::string p = prompt_template;
    const std::string key = "{target_lang}";
    for (std::size_t pos = p.find(key); pos != std::string::npos; pos = p.find(key, pos))
        p.replace(pos, key.size(), target_lang);
    return p;
}

std::string to_string(TruncationRule rule) {
    switch (rule) {
        case TruncationRule::stability: return "stability";
        case TruncationRule::sentence: return "sentence";
        case TruncationRule::forced: return "forced";
        case TruncationRule::end_of_stream: return "end_of_stream";
    }
    return "stability";
}

TruncationRule truncation_rule_from_string(const std::string& s) {
    if (s == "stability") return TruncationRule::stability;
    if (s == "sentence") return TruncationRule::sentence;
    if (s == "forced") return TruncationRule::forced;
    if (s == "end_of_stream") return TruncationRule::end_of_stream;
    throw ParseError("unknown truncation rule: " + s);
}

bool SessionState::same_state(const SessionState& other) const {
    if (seg_start != other.seg_start || trans_anchor != other.trans_anchor ||
        current_chunk != other.current_chunk || segments_closed != other.segments_closed ||
        emitted != other.emitted || queue.size() != other.queue.size())
        return false;
    // Queue entries compare by text: a replayed queue has no word timestamps.
    for (std::size_t i = 0; i < queue.size(); ++i)
        if (queue[i].text != other.queue[i].text) return false;
    return true;
}

}  // namespace streamst
