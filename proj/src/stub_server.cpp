#include "streamst/stub_server.hpp"

#include <chrono>

#include <httplib.h>
#include <json.hpp>

#include "streamst/backend.hpp"
#include "streamst/errors.hpp"

namespace streamst {

using nlohmann::json;

StubFault::Kind fault_kind_from_string(const std::string& s) {
    if (s == "none") return StubFault::Kind::none;
    if (s == "delay") return StubFault::Kind::delay;
    if (s == "http500") return StubFault::Kind::http500;
    if (s == "retract") return StubFault::Kind::retract;
    throw ConfigError("unknown fault kind: " + s);
}

namespace {

BackendRequest parse_request(const json& j, RequestMode fallback_mode) {
    BackendRequest req;
    req.source_id = j.at("source_id").get<std::string>();
    const auto& window = j.at("window_ms");
    req.window_start_ms = window.at(0).get<std::int64_t>();
    req.window_end_ms = window.at(1).get<std::int64_t>();
    req.transcription = j.value("transcription", "");
    req.committed = j.value("committed", "");
    req.prompt = j.value("prompt", "");
    if (j.contains("max_words")) {
        req.mode = RequestMode::translate_bounded;
        req.max_words = j["max_words"].get<int>();
    } else {
        req.mode = fallback_mode;
    }
    return req;
}

}  // namespace

StubServer::StubServer(std::shared_ptr<const FixtureStore> store, StubFault fault,
                       std::string auth_token)
    : store_(std::move(store)),
      fault_(std::move(fault)),
      auth_token_(std::move(auth_token)),
      server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

StubServer::~StubServer() { stop(); }

void StubServer::install_routes() {
    auto backend = std::make_shared<ScriptedBackend>(store_);

    auto guarded = [this](const httplib::Request& http_req, httplib::Response& http_res,
                          const std::string& endpoint, auto&& answer) {
        if (!auth_token_.empty() &&
            http_req.get_header_value("Authorization") != "Bearer " + auth_token_) {
            http_res.status = 401;
            http_res.set_content(json{{"error", "unauthorized"}}.dump(), "application/json");
            return;
        }
        json body;
        try {
            body = json::parse(http_req.body);
        } catch (const json::parse_error& e) {
            http_res.status = 400;
            http_res.set_content(json{{"error", e.what()}}.dump(), "application/json");
            return;
        }

        try {
            BackendRequest req = parse_request(
                body, endpoint == "transcribe" ? RequestMode::transcribe
                                               : RequestMode::translate_flush);
            const std::int64_t chunk_ms = store_->contains(req.source_id)
                                              ? store_->get(req.source_id).chunk_ms
                                              : 0;
            const std::int64_t chunk = chunk_ms > 0 ? req.window_end_ms / chunk_ms : -1;
            const bool fire = fault_.kind != StubFault::Kind::none &&
                              fault_.endpoint == endpoint &&
                              (fault_.at_chunk < 0 || chunk == fault_.at_chunk);
            if (fire) {
                switch (fault_.kind) {
                    case StubFault::Kind::delay:
                        std::this_thread::sleep_for(std::chrono::milliseconds(fault_.delay_ms));
                        break;  // then answer normally
                    case StubFault::Kind::http500:
                        http_res.status = 500;
                        http_res.set_content(json{{"error", "injected failure"}}.dump(),
                                             "application/json");
                        return;
                    case StubFault::Kind::retract:
                        // A full-text reply that drops the committed prefix.
                        http_res.set_content(json{{"text", "<retracted>"}}.dump(),
                                             "application/json");
                        return;
                    case StubFault::Kind::none:
                        break;
                }
            }
            http_res.set_content(answer(req).dump(), "application/json");
        } catch (const Error& e) {
            http_res.status = 400;
            http_res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    };

    server_->Post("/v1/transcribe",
                  [backend, guarded](const httplib::Request& req, httplib::Response& res) {
                      guarded(req, res, "transcribe", [backend](const BackendRequest& r) {
                          return json{{"text", backend->transcribe(r).text}};
                      });
                  });
    server_->Post("/v1/translate",
                  [backend, guarded](const httplib::Request& req, httplib::Response& res) {
                      guarded(req, res, "translate", [backend](const BackendRequest& r) {
                          return json{{"words", backend->translate(r)}};
                      });
                  });
}

int StubServer::start() {
    port_ = server_->bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw TransportError("stub server could not bind a local port");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

bool StubServer::run(const std::string& host, int port) {
    port_ = port;
    return server_->listen(host, port);
}

void StubServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace streamst
