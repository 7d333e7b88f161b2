#pragma once

#include <stdexcept>
#include <string>

namespace streamst {

// Base type for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration (bad k, empty punctuation set, bad CLI flags).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent event trace during replay.
class TraceError : public Error {
public:
    using Error::Error;
};

// Fixture / manifest / JSON input problems. Carries a line number when the
// source is line-delimited.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg, long line = -1)
        : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// Metric preconditions (empty emission log, mismatched corpus sizes, ...).
class MetricError : public Error {
public:
    using Error::Error;
};

// --- remote backend error kinds, one class per distinct failure mode ---

class TransportError : public Error {
public:
    using Error::Error;
};

class TimeoutError : public TransportError {
public:
    using TransportError::TransportError;
};

// HTTP status >= 400 from the service.
class ServiceError : public Error {
public:
    ServiceError(const std::string& msg, int status)
        : Error(msg + " (status " + std::to_string(status) + ")"), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

// Response that is syntactically valid but violates the protocol contract,
// e.g. a translation that does not extend the committed prefix.
class ProtocolViolation : public Error {
public:
    using Error::Error;
};

// A step failure surfaced by the engine; remembers which chunk broke.
class EngineError : public Error {
public:
    EngineError(const std::string& msg, int chunk)
        : Error("chunk " + std::to_string(chunk) + ": " + msg), chunk_(chunk) {}
    int chunk() const { return chunk_; }

private:
    int chunk_;
};

}  // namespace streamst
