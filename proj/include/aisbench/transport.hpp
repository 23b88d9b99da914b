#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aisbench {

/// Where a request came from. Carried for scripted responders and logs only;
/// it never enters the archive key.
struct RequestTag {
    std::string method;
    std::string query_id;
    std::size_t dataset_size = 0;
    std::string bindings;
    std::string phase; ///< answer | sql | interpret | regenerate
};

struct ChatRequest {
    std::string prompt;
    double temperature = 0.5;
    std::size_t sample_index = 0;
    RequestTag tag;
};

struct ChatResponse {
    std::string text;
    long long latency_ms = 0;
    std::string model_id;
};

/// One stored exchange. (prompt_digest, sample_index) is unique per archive.
struct TransportRecord {
    std::string prompt_digest;
    std::size_t sample_index = 0;
    std::string response_text;
    long long latency_ms = 0;
    std::string model_id;

    [[nodiscard]] std::string to_json_line() const;
    static TransportRecord from_json_line(std::string_view line);
    friend bool operator==(const TransportRecord&, const TransportRecord&) = default;
};

std::string prompt_digest(std::string_view prompt);

/// Append-only JSON-lines archive. Reads are shared, appends serialized.
class ReplayArchive {
public:
    ReplayArchive() = default;
    /// Loads `path` if it exists; later appends go to the same file.
    explicit ReplayArchive(std::filesystem::path path);

    [[nodiscard]] std::optional<TransportRecord> find(const std::string& digest, std::size_t index) const;
    /// Throws TransportError on a duplicate key.
    void append(const TransportRecord& record);
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::map<std::pair<std::string, std::size_t>, TransportRecord> records_;
};

class Transport {
public:
    virtual ~Transport() = default;
    /// Thread-safe. Throws TransportError; `transient()` failures may be retried.
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

/// Serves archived responses. A missing entry is a hard, non-retryable error.
class ReplayTransport final : public Transport {
public:
    explicit ReplayTransport(const ReplayArchive& archive) : archive_(archive) {}
    ChatResponse complete(const ChatRequest& request) override;

private:
    const ReplayArchive& archive_;
};

/// Forwards to `inner` and appends every fresh exchange to the archive.
/// Exchanges already in the archive are served from it.
class RecordingTransport final : public Transport {
public:
    RecordingTransport(Transport& inner, ReplayArchive& archive) : inner_(inner), archive_(archive) {}
    ChatResponse complete(const ChatRequest& request) override;

private:
    Transport& inner_;
    ReplayArchive& archive_;
};

struct HttpChatConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model_id;
    std::string credential_env; ///< name of the variable holding the bearer token
    int timeout_seconds = 120;
};

/// OpenAI-compatible chat-completions client.
class HttpChatTransport final : public Transport {
public:
    /// Throws ConfigError when the credential variable is unset.
    explicit HttpChatTransport(HttpChatConfig cfg);
    ChatResponse complete(const ChatRequest& request) override;

private:
    HttpChatConfig cfg_;
    std::string token_;
};

/// In-process responder, for fixtures and tests.
class ScriptedTransport final : public Transport {
public:
    using Responder = std::function<std::string(const ChatRequest&)>;
    ScriptedTransport(Responder responder, std::string model_id)
        : responder_(std::move(responder)), model_id_(std::move(model_id)) {}
    ChatResponse complete(const ChatRequest& request) override;

private:
    Responder responder_;
    std::string model_id_;
};

} // namespace aisbench
