#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "csales/common.hpp"

#include <json.hpp>

namespace csales::gateway {

enum class Role { System, User, Assistant };

std::string role_name(Role role);

struct ChatMessage {
    Role role;
    std::string content;
};

// Fixture address for deterministic playback: one dialogue can hit the same
// template several times (one turn index per recommender turn, attempts
// count retries within a call site).
struct FixtureKey {
    std::string template_id;
    std::string dialogue_id;
    int turn = 0;

    bool operator<(const FixtureKey& other) const {
        if (template_id != other.template_id) return template_id < other.template_id;
        if (dialogue_id != other.dialogue_id) return dialogue_id < other.dialogue_id;
        return turn < other.turn;
    }
    std::string str() const;
};

struct CompletionParams {
    double temperature = 0.0;
    int max_tokens = 1024;
    FixtureKey key;  // routing tag; ignored by the live backend
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const std::vector<ChatMessage>& messages,
                                 const CompletionParams& params) = 0;
    virtual std::string name() const = 0;
    virtual bool deterministic() const = 0;
};

struct LiveBackendConfig {
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key;
    int requests_per_minute = 60;
};

// HTTP chat-completion client with retry/backoff and a coarse per-process
// token bucket.
class LiveBackend : public Backend {
public:
    explicit LiveBackend(LiveBackendConfig config);
    std::string complete(const std::vector<ChatMessage>& messages,
                         const CompletionParams& params) override;
    std::string name() const override { return "live"; }
    bool deterministic() const override { return false; }

private:
    void throttle();
    LiveBackendConfig config_;
    std::mutex mutex_;
    double tokens_;
    std::chrono::steady_clock::time_point last_refill_;
};

// Plays back canned responses. A missing fixture is a hard failure so test
// runs cannot silently drift.
class ScriptedBackend : public Backend {
public:
    ScriptedBackend() = default;
    static std::unique_ptr<ScriptedBackend> from_file(const std::string& path);

    void load_file(const std::string& path);
    void add(const FixtureKey& key, int attempt, std::string response);
    void merge(const ScriptedBackend& other);
    void save(const std::string& path) const;
    std::size_t size() const;

    std::string complete(const std::vector<ChatMessage>& messages,
                         const CompletionParams& params) override;
    std::string name() const override { return "scripted"; }
    bool deterministic() const override { return true; }

private:
    mutable std::mutex mutex_;
    std::map<std::pair<FixtureKey, int>, std::string> fixtures_;
    std::map<FixtureKey, int> attempt_counts_;
};

class NullBackend : public Backend {
public:
    std::string complete(const std::vector<ChatMessage>& messages,
                         const CompletionParams& params) override;
    std::string name() const override { return "null"; }
    bool deterministic() const override { return true; }
};

// Wraps a response function and records every exchange so a later scripted
// run can replay it byte for byte.
class RecordingBackend : public Backend {
public:
    using Responder = std::function<std::string(const std::vector<ChatMessage>&,
                                                const CompletionParams&, int attempt)>;
    explicit RecordingBackend(Responder responder);

    std::string complete(const std::vector<ChatMessage>& messages,
                         const CompletionParams& params) override;
    std::string name() const override { return "recording"; }
    bool deterministic() const override { return true; }

    const ScriptedBackend& recorded() const { return tape_; }
    void save(const std::string& path) const { tape_.save(path); }

private:
    Responder responder_;
    ScriptedBackend tape_;
    std::mutex mutex_;
    std::map<FixtureKey, int> attempt_counts_;
};

// First balanced {...} block in the text, or empty when none parses.
std::string extract_json_object(const std::string& text);

// complete() then parse; on bad JSON, re-asks with a correction instruction
// up to max_retries. Throws ParseError carrying the raw text when exhausted.
nlohmann::json complete_json(Backend& backend, std::vector<ChatMessage> messages,
                             const CompletionParams& params, int max_retries);

}  // namespace csales::gateway
