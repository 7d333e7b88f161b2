#include <algorithm>

#include "streamst/backend.hpp"
#include "streamst/errors.hpp"
#include "streamst/text.hpp"

namespace streamst {

Transcription ScriptedBackend::transcribe(const BackendRequest& req) {
    const Fixture& fixture = store_->get(req.source_id);
    Transcription t;
    std::vector<std::string> toks;
    for (const auto& w : fixture.src_words) {
        if (w.end_ms <= req.window_start_ms) continue;
        if (w.end_ms > req.window_end_ms) break;  // end_ms nondecreasing
        t.words.push_back({w.token, w.end_ms});
        toks.push_back(w.token);
    }
    t.text = text::join(toks);
    return t;
}

std::vector<std::string> ScriptedBackend::translate(const BackendRequest& req) {
    if (req.mode == RequestMode::transcribe)
        throw ParseError("translate called with transcribe mode");
    const Fixture& fixture = store_->get(req.source_id);

    // Document position = everything flushed for earlier segments (recovered
    // from the window start: closed segments were flushed to exactly the
    // eligible set at their end time) plus this segment's emitted words.
    const long pos = fixture.eligible_targets(req.window_start_ms) +
                     static_cast<long>(text::word_count(req.committed));
    const long eligible = fixture.eligible_targets(req.window_end_ms);

    long last = eligible;
    if (req.mode == RequestMode::translate_bounded)
        last = std::min<long>(eligible, pos + std::max(0, req.max_words));

    std::vector<std::string> out;
    for (long j = pos; j < last; ++j)
        out.push_back(fixture.ref_translation_words[static_cast<std::size_t>(j)]);
    return out;
}

}  // namespace streamst
