#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>

#include "streamst/backend.hpp"

namespace httplib {
class Client;
}

namespace streamst {

struct RemoteOptions {
    std::string base_url;         // e.g. "http://127.0.0.1:8900"
    int timeout_ms = 30000;       // connect and read/write alike
    std::string auth_token;       // sent as "Authorization: Bearer ..." when set
};

// HTTP client for the stateless wire protocol: POST /v1/transcribe and
// /v1/translate with JSON bodies. Each failure mode surfaces as its own
// exception type: TimeoutError, TransportError, ServiceError (HTTP >= 400),
// ParseError (malformed response), ProtocolViolation (translation retraction).
class RemoteBackend : public Backend {
public:
    explicit RemoteBackend(RemoteOptions options);
    ~RemoteBackend() override;

    Transcription transcribe(const BackendRequest& req) override;
    std::vector<std::string> translate(const BackendRequest& req) override;

private:
    std::string post(const std::string& path, const std::string& body);

    RemoteOptions options_;
    std::unique_ptr<httplib::Client> client_;
    std::mutex mutex_;          // httplib clients are not concurrency-safe
    std::uint64_t request_id_ = 0;
};

}  // namespace streamst
