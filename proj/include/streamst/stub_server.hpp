#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include "streamst/fixture.hpp"

namespace httplib {
class Server;
}

namespace streamst {

// Scripted misbehavior for exercising the remote client's failure paths.
struct StubFault {
    enum class Kind { none, delay, http500, retract };
    Kind kind = Kind::none;
    std::string endpoint = "translate";  // "transcribe" or "translate"
    std::int64_t at_chunk = -1;          // fire when window_end / chunk_ms matches; -1 = every request
    int delay_ms = 1000;
};

StubFault::Kind fault_kind_from_string(const std::string& s);

// Serves the wire protocol over a fixture store, answering exactly as the
// scripted backend would. One instance per store; safe to query concurrently.
class StubServer {
public:
    explicit StubServer(std::shared_ptr<const FixtureStore> store, StubFault fault = {},
                        std::string auth_token = {});
    ~StubServer();

    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;

    // Binds 127.0.0.1 on a free port and serves from a background thread.
    // Returns the port. For tests.
    int start();

    // Serves on a fixed host/port, blocking until stop(). For the CLI.
    bool run(const std::string& host, int port);

    void stop();

    int port() const { return port_; }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    void install_routes();

    std::shared_ptr<const FixtureStore> store_;
    StubFault fault_;
    std::string auth_token_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace streamst
