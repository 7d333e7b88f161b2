#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "streamst/fixture.hpp"
#include "streamst/types.hpp"

namespace streamst {

enum class RequestMode { transcribe, translate_bounded, translate_flush };

// One stateless request: the full segment window plus the committed
// translation are resent every tick.
struct BackendRequest {
    RequestMode mode = RequestMode::transcribe;
    std::string source_id;
    std::int64_t window_start_ms = 0;  // exclusive
    std::int64_t window_end_ms = 0;    // inclusive
    std::int64_t chunk_ms = 0;
    std::vector<std::string> payloads;  // segment audio bytes, empty in scripted mode
    std::string transcription;  // x^(n), required for translate modes
    std::string committed;      // y_{b_m+1 : i-1}, the segment's emitted words
    int max_words = 0;          // bound for translate_bounded
    std::string prompt;
};

// The two-call contract: transcribe a speech prefix, then continue the
// translation conditioned on that transcription.
class Backend {
public:
    virtual ~Backend() = default;
    virtual Transcription transcribe(const BackendRequest& req) = 0;
    virtual std::vector<std::string> translate(const BackendRequest& req) = 0;
};

// Deterministic fixture-driven backend. Transcription returns exactly the
// source words whose end time falls inside the request window; translation
// returns reference words whose aligned source position has been heard,
// continuing after the committed prefix.
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(std::shared_ptr<const FixtureStore> store)
        : store_(std::move(store)) {}

    Transcription transcribe(const BackendRequest& req) override;
    std::vector<std::string> translate(const BackendRequest& req) override;

private:
    std::shared_ptr<const FixtureStore> store_;
};

}  // namespace streamst
