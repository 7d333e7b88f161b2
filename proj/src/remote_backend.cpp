#include "streamst/remote_backend.hpp"

#include <httplib.h>
#include <json.hpp>

#include "streamst/errors.hpp"
#include "streamst/text.hpp"

namespace streamst {

using nlohmann::json;

namespace {

std::string base64_encode(const std::string& bytes) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= bytes.size()) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                           static_cast<unsigned char>(bytes[i + 2]);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += alphabet[v & 63];
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        const unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

json request_body(const BackendRequest& req) {
    json body;
    body["source_id"] = req.source_id;
    std::string audio;
    for (const auto& p : req.payloads) audio += p;
    if (audio.empty())
        body["fixture_ref"] = req.source_id;
    else
        body["audio_b64"] = base64_encode(audio);
    body["window_ms"] = json::array({req.window_start_ms, req.window_end_ms});
    if (req.mode != RequestMode::transcribe) {
        body["transcription"] = req.transcription;
        body["committed"] = req.committed;
        if (req.mode == RequestMode::translate_bounded) body["max_words"] = req.max_words;
    }
    body["prompt"] = req.prompt;
    return body;
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteOptions options) : options_(std::move(options)) {
    if (options_.base_url.empty()) throw ConfigError("remote backend needs a base url");
    client_ = std::make_unique<httplib::Client>(options_.base_url);
    const time_t sec = options_.timeout_ms / 1000;
    const time_t usec = (options_.timeout_ms % 1000) * 1000;
    client_->set_connection_timeout(sec, usec);
    client_->set_read_timeout(sec, usec);
    client_->set_write_timeout(sec, usec);
    if (!options_.auth_token.empty())
        client_->set_default_headers({{"Authorization", "Bearer " + options_.auth_token}});
}

RemoteBackend::~RemoteBackend() = default;

std::string RemoteBackend::post(const std::string& path, const std::string& body) {
    std::lock_guard<std::mutex> lock(mutex_);
    const std::uint64_t id = ++request_id_;
    const std::string where = "request " + std::to_string(id) + " to " + path;

    auto res = client_->Post(path, body, "application/json");
    if (!res) {
        switch (res.error()) {
            case httplib::Error::ConnectionTimeout:
                throw TimeoutError(where + ": connection timed out");
            case httplib::Error::Read:
                throw TimeoutError(where + ": no response within " +
                                   std::to_string(options_.timeout_ms) + " ms");
            default:
                throw TransportError(where + ": " + httplib::to_string(res.error()));
        }
    }
    if (res->status >= 400) throw ServiceError(where + " failed", res->status);
    return res->body;
}

Transcription RemoteBackend::transcribe(const BackendRequest& req) {
    const std::string raw = post("/v1/transcribe", request_body(req).dump());
    json j;
    try {
        j = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("transcribe response is not JSON: ") + e.what());
    }
    if (j.contains("text") && j["text"].is_string())
        return Transcription::from_text(j["text"].get<std::string>());
    if (j.contains("words") && j["words"].is_array()) {
        std::vector<std::string> words;
        for (const auto& w : j["words"]) words.push_back(w.get<std::string>());
        return Transcription::from_text(text::join(words));
    }
    throw ParseError("transcribe response carries neither \"text\" nor \"words\"");
}

std::vector<std::string> RemoteBackend::translate(const BackendRequest& req) {
    const std::string raw = post("/v1/translate", request_body(req).dump());
    json j;
    try {
        j = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("translate response is not JSON: ") + e.what());
    }

    std::vector<std::string> words;
    if (j.contains("words") && j["words"].is_array()) {
        for (const auto& w : j["words"]) words.push_back(w.get<std::string>());
    } else if (j.contains("text") && j["text"].is_string()) {
        // A text-form reply restates the whole segment translation; anything
        // that fails to extend the committed prefix is a retraction.
        const std::string full = j["text"].get<std::string>();
        if (!req.committed.empty() && !full.starts_with(req.committed))
            throw ProtocolViolation("service retracted the committed translation: \"" + full +
                                    "\" does not extend \"" + req.committed + "\"");
        words = text::split_words(full.substr(req.committed.size()));
    } else {
        throw ParseError("translate response carries neither \"text\" nor \"words\"");
    }

    // The wire bound is advisory; over-generation is cut here.
    if (req.mode == RequestMode::translate_bounded &&
        words.size() > static_cast<std::size_t>(req.max_words))
        words.resize(static_cast<std::size_t>(req.max_words));
    return words;
}

}  // namespace streamst
