#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace aisbench {

/// Base for every failure the harness reports to the operator. The CLI maps
/// each subclass onto its own exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (flags, config file, sweep sizes).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Missing or malformed input data, or a stage artifact that is not there.
class DataError : public Error {
public:
    using Error::Error;
};

/// LLM transport failure: network, HTTP status, or a replay-archive miss.
class TransportError : public Error {
public:
    explicit TransportError(const std::string& what, bool transient = false)
        : Error(what), transient_(transient) {}
    /// Worth retrying: timeouts, connection resets, 429 and 5xx.
    [[nodiscard]] bool transient() const { return transient_; }

private:
    bool transient_;
};

/// A prompt exceeds the context budget; names the data block that tipped it.
class ContextOverflowError : public Error {
public:
    ContextOverflowError(const std::string& what, std::string block) : Error(what), block_(std::move(block)) {}
    [[nodiscard]] const std::string& block() const { return block_; }

private:
    std::string block_;
};

/// SQL backend could not be opened or loaded.
class BackendError : public Error {
public:
    using Error::Error;
};

} // namespace aisbench
