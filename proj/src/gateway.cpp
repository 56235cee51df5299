#include "csales/gateway.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#define CPPHTTPLIB_NO_EXCEPTIONS 1
#include <httplib.h>

namespace csales::gateway {

using nlohmann::json;

std::string role_name(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

std::string FixtureKey::str() const {
    return template_id + "|" + dialogue_id + "|" + std::to_string(turn);
}

LiveBackend::LiveBackend(LiveBackendConfig config)
    : config_(std::move(config)),
      tokens_(static_cast<double>(config_.requests_per_minute)),
      last_refill_(std::chrono::steady_clock::now()) {
    if (config_.base_url.empty()) throw ConfigError("live backend requires base_url");
    if (config_.model.empty()) throw ConfigError("live backend requires a model name");
}

void LiveBackend::throttle() {
    std::unique_lock<std::mutex> lock(mutex_);
    const double rate = config_.requests_per_minute / 60.0;
    for (;;) {
        auto now = std::chrono::steady_clock::now();
        const double elapsed = std::chrono::duration<double>(now - last_refill_).count();
        tokens_ = std::min(static_cast<double>(config_.requests_per_minute),
                           tokens_ + elapsed * rate);
        last_refill_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        lock.unlock();
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        lock.lock();
    }
}

std::string LiveBackend::complete(const std::vector<ChatMessage>& messages,
                                  const CompletionParams& params) {
    if (messages.empty()) throw ConfigError("complete() requires messages");
    json body;
    body["model"] = config_.model;
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_tokens;
    body["messages"] = json::array();
    for (const auto& m : messages)
        body["messages"].push_back({{"role", role_name(m.role)}, {"content", m.content}});

    std::string last_error;
    for (int attempt = 0; attempt < 3; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(500 * (1 << attempt)));
        throttle();
        httplib::Client client(config_.base_url);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        auto res = client.Post(config_.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error";
            continue;
        }
        if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status) + ": " + res->body;
            continue;
        }
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded()) {
            last_error = "response body is not JSON";
            continue;
        }
        try {
            return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            last_error = std::string("unexpected response shape: ") + e.what();
        }
    }
    throw GatewayError("chat completion failed after 3 attempts: " + last_error);
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path) {
    auto backend = std::make_unique<ScriptedBackend>();
    backend->load_file(path);
    return backend;
}

void ScriptedBackend::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open fixture file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw IoError("malformed fixture line " + std::to_string(line_no) + " in " + path);
        FixtureKey key{j.at("template_id").get<std::string>(),
                       j.at("dialogue_id").get<std::string>(), j.at("turn").get<int>()};
        add(key, j.value("attempt", 0), j.at("response").get<std::string>());
    }
}

void ScriptedBackend::add(const FixtureKey& key, int attempt, std::string response) {
    std::lock_guard<std::mutex> lock(mutex_);
    fixtures_[{key, attempt}] = std::move(response);
}

void ScriptedBackend::merge(const ScriptedBackend& other) {
    std::scoped_lock lock(mutex_, other.mutex_);
    for (const auto& [key, response] : other.fixtures_) fixtures_[key] = response;
}

void ScriptedBackend::save(const std::string& path) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::ofstream f(path);
    if (!f) throw IoError("cannot write fixture file: " + path);
    for (const auto& [key, response] : fixtures_) {
        json j = {{"template_id", key.first.template_id},
                  {"dialogue_id", key.first.dialogue_id},
                  {"turn", key.first.turn},
                  {"attempt", key.second},
                  {"response", response}};
        f << j.dump() << "\n";
    }
}

std::size_t ScriptedBackend::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return fixtures_.size();
}

std::string ScriptedBackend::complete(const std::vector<ChatMessage>& messages,
                                      const CompletionParams& params) {
    if (messages.empty()) throw ConfigError("complete() requires messages");
    std::lock_guard<std::mutex> lock(mutex_);
    const int attempt = attempt_counts_[params.key]++;
    auto it = fixtures_.find({params.key, attempt});
    if (it == fixtures_.end())
        throw GatewayError("missing fixture for key " + params.key.str() + " attempt " +
                           std::to_string(attempt));
    return it->second;
}

std::string NullBackend::complete(const std::vector<ChatMessage>&, const CompletionParams&) {
    throw GatewayError("null backend cannot complete requests");
}

RecordingBackend::RecordingBackend(Responder responder) : responder_(std::move(responder)) {}

std::string RecordingBackend::complete(const std::vector<ChatMessage>& messages,
                                       const CompletionParams& params) {
    int attempt;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        attempt = attempt_counts_[params.key]++;
    }
    std::string response = responder_(messages, params, attempt);
    tape_.add(params.key, attempt, response);
    return response;
}

std::string extract_json_object(const std::string& text) {
    for (std::size_t start = 0; start < text.size(); ++start) {
        if (text[start] != '{') continue;
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (escaped)
                    escaped = false;
                else if (c == '\\')
                    escaped = true;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) {
                    std::string candidate = text.substr(start, i - start + 1);
                    json parsed = json::parse(candidate, nullptr, false);
                    if (!parsed.is_discarded()) return candidate;
                    break;  // balanced but invalid; try the next '{'
                }
            }
        }
    }
    return {};
}

nlohmann::json complete_json(Backend& backend, std::vector<ChatMessage> messages,
                             const CompletionParams& params, int max_retries) {
    std::string raw;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        raw = backend.complete(messages, params);
        std::string candidate = extract_json_object(raw);
        if (!candidate.empty()) return json::parse(candidate);
        messages.push_back({Role::Assistant, raw});
        messages.push_back({Role::User,
                            "Your previous reply did not contain a valid JSON object. "
                            "Respond again with exactly one JSON object and nothing else."});
    }
    throw ParseError("no valid JSON object after " + std::to_string(max_retries + 1) +
                         " attempts",
                     raw);
}

}  // namespace csales::gateway
