#include "aisbench/transport.hpp"

#include "aisbench/digest.hpp"
#include "aisbench/error.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>

namespace aisbench {

using nlohmann::json;

std::string prompt_digest(std::string_view prompt) { return sha256_hex(prompt); }

std::string TransportRecord::to_json_line() const {
    // ordered_json keeps the field order stable in the archive
    nlohmann::ordered_json j;
    j["prompt_digest"] = prompt_digest;
    j["sample_index"] = sample_index;
    j["response_text"] = response_text;
    j["latency_ms"] = latency_ms;
    j["model_id"] = model_id;
    return j.dump();
}

TransportRecord TransportRecord::from_json_line(std::string_view line) {
    try {
        const auto j = json::parse(line);
        return {j.at("prompt_digest").get<std::string>(), j.at("sample_index").get<std::size_t>(),
                j.at("response_text").get<std::string>(), j.value("latency_ms", 0LL),
                j.value("model_id", std::string{})};
    } catch (const json::exception& e) {
        throw TransportError(std::string("malformed archive record: ") + e.what());
    }
}

ReplayArchive::ReplayArchive(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) {
        return;
    }
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) {
            continue;
        }
        auto r = TransportRecord::from_json_line(line);
        auto key = std::make_pair(r.prompt_digest, r.sample_index);
        if (!records_.emplace(std::move(key), std::move(r)).second) {
            throw TransportError(path_.string() + ":" + std::to_string(number) + ": duplicate archive key");
        }
    }
}

std::optional<TransportRecord> ReplayArchive::find(const std::string& digest, std::size_t index) const {
    std::lock_guard lock(mutex_);
    const auto it = records_.find({digest, index});
    if (it == records_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void ReplayArchive::append(const TransportRecord& record) {
    std::lock_guard lock(mutex_);
    if (!records_.emplace(std::make_pair(record.prompt_digest, record.sample_index), record).second) {
        throw TransportError("archive already holds " + record.prompt_digest + "#" +
                             std::to_string(record.sample_index));
    }
    if (path_.empty()) {
        return;
    }
    std::ofstream out(path_, std::ios::app);
    out << record.to_json_line() << '\n';
    if (!out) {
        throw TransportError("cannot append to " + path_.string());
    }
}

std::size_t ReplayArchive::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

ChatResponse ReplayTransport::complete(const ChatRequest& request) {
    const auto digest = prompt_digest(request.prompt);
    const auto r = archive_.find(digest, request.sample_index);
    if (!r) {
        throw TransportError("replay archive has no response for " + request.tag.method + " " +
                             request.tag.query_id + " size " + std::to_string(request.tag.dataset_size) + " [" +
                             request.tag.phase + "] prompt " + digest + " sample " +
                             std::to_string(request.sample_index));
    }
    return {r->response_text, r->latency_ms, r->model_id};
}

ChatResponse RecordingTransport::complete(const ChatRequest& request) {
    const auto digest = prompt_digest(request.prompt);
    if (const auto r = archive_.find(digest, request.sample_index)) {
        return {r->response_text, r->latency_ms, r->model_id};
    }
    auto response = inner_.complete(request);
    archive_.append({digest, request.sample_index, response.text, response.latency_ms, response.model_id});
    return response;
}

HttpChatTransport::HttpChatTransport(HttpChatConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.credential_env.empty()) {
        throw ConfigError("live transport needs the name of a credential environment variable");
    }
    const char* token = std::getenv(cfg_.credential_env.c_str());
    if (!token || !*token) {
        throw ConfigError("environment variable " + cfg_.credential_env + " is not set");
    }
    token_ = token;
    if (cfg_.model_id.empty()) {
        throw ConfigError("live transport needs a model id");
    }
}

ChatResponse HttpChatTransport::complete(const ChatRequest& request) {
    const auto scheme_end = cfg_.endpoint.find("://");
    const auto path_start = cfg_.endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const auto origin = cfg_.endpoint.substr(0, path_start);
    const auto path = path_start == std::string::npos ? std::string("/") : cfg_.endpoint.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(cfg_.timeout_seconds);
    client.set_read_timeout(cfg_.timeout_seconds);
    client.set_bearer_token_auth(token_);

    const json body = {{"model", cfg_.model_id},
                       {"temperature", request.temperature},
                       {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})}};
    const auto start = std::chrono::steady_clock::now();
    const auto res = client.Post(path, body.dump(), "application/json");
    const auto latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    if (!res) {
        throw TransportError("request to " + origin + " failed: " + httplib::to_string(res.error()), true);
    }
    if (res->status != 200) {
        const bool transient = res->status == 429 || res->status >= 500;
        throw TransportError("HTTP " + std::to_string(res->status) + " from " + origin, transient);
    }
    try {
        const auto j = json::parse(res->body);
        return {j.at("choices").at(0).at("message").at("content").get<std::string>(), latency,
                j.value("model", cfg_.model_id)};
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected completion payload: ") + e.what());
    }
}

ChatResponse ScriptedTransport::complete(const ChatRequest& request) {
    return {responder_(request), 0, model_id_};
}

} // namespace aisbench
