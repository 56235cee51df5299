#include "csales/config.hpp"

#include <fstream>
#include <set>

namespace csales::config {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ConfigError("unknown config key '" + key + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void check_choice(const std::string& value, const char* key,
                  const std::set<std::string>& allowed) {
    if (!allowed.count(value))
        throw ConfigError(std::string("invalid value '") + value + "' for " + key);
}

}  // namespace

std::string hash_config(const json& j) {
    json canon = j;
    canon.erase("out_dir");  // where files land is not part of the experiment
    return to_hex(fnv1a64(canon.dump()));
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    require_keys(j, "config",
                 {"domain", "catalog_snapshot", "profiles", "index_snapshot", "agent_variant",
                  "simulator_mode", "memory", "retrieval", "rule", "max_turns", "seed",
                  "workers", "gateway", "ingest", "chat", "cohort_per_trait", "prompts_dir",
                  "out_dir"});

    RunConfig cfg;
    read(j, "domain", cfg.domain);
    read(j, "catalog_snapshot", cfg.catalog_snapshot);
    read(j, "profiles", cfg.profiles_path);
    read(j, "index_snapshot", cfg.index_snapshot);
    read(j, "agent_variant", cfg.agent_variant);
    read(j, "simulator_mode", cfg.simulator_mode);
    read(j, "max_turns", cfg.max_turns);
    read(j, "seed", cfg.seed);
    read(j, "workers", cfg.workers);
    read(j, "cohort_per_trait", cfg.cohort_per_trait);
    read(j, "prompts_dir", cfg.prompts_dir);
    read(j, "out_dir", cfg.out_dir);

    if (j.contains("memory")) {
        const json& m = j["memory"];
        require_keys(m, "memory", {"mode", "value", "path", "k"});
        read(m, "mode", cfg.memory.mode);
        read(m, "value", cfg.memory.value);
        read(m, "path", cfg.memory.path);
        read(m, "k", cfg.memory.k);
    }
    if (j.contains("retrieval")) {
        const json& r = j["retrieval"];
        require_keys(r, "retrieval",
                     {"provider", "dim", "k_suggest", "candidate_top_k",
                      "augment_query_with_path", "http_base_url", "http_path", "http_model",
                      "api_key_env"});
        read(r, "provider", cfg.retrieval.provider);
        read(r, "dim", cfg.retrieval.dim);
        read(r, "k_suggest", cfg.retrieval.k_suggest);
        read(r, "candidate_top_k", cfg.retrieval.candidate_top_k);
        read(r, "augment_query_with_path", cfg.retrieval.augment_query_with_path);
        read(r, "http_base_url", cfg.retrieval.http_base_url);
        read(r, "http_path", cfg.retrieval.http_path);
        read(r, "http_model", cfg.retrieval.http_model);
        read(r, "api_key_env", cfg.retrieval.api_key_env);
    }
    if (j.contains("rule")) {
        const json& r = j["rule"];
        require_keys(r, "rule",
                     {"theta_in", "theta_out", "framing_bonus", "reveal_active",
                      "reveal_neutral", "reveal_passive", "stopwords"});
        read(r, "theta_in", cfg.rule.theta_in);
        read(r, "theta_out", cfg.rule.theta_out);
        read(r, "framing_bonus", cfg.rule.framing_bonus);
        read(r, "reveal_active", cfg.rule.reveal_active);
        read(r, "reveal_neutral", cfg.rule.reveal_neutral);
        read(r, "reveal_passive", cfg.rule.reveal_passive);
        read(r, "stopwords", cfg.rule.stopwords);
    }
    if (j.contains("gateway")) {
        const json& g = j["gateway"];
        require_keys(g, "gateway",
                     {"backend", "fixtures", "base_url", "path", "model", "api_key_env",
                      "temperature", "max_tokens", "requests_per_minute"});
        read(g, "backend", cfg.gateway.backend);
        read(g, "fixtures", cfg.gateway.fixtures);
        read(g, "base_url", cfg.gateway.base_url);
        read(g, "path", cfg.gateway.path);
        read(g, "model", cfg.gateway.model);
        read(g, "api_key_env", cfg.gateway.api_key_env);
        read(g, "temperature", cfg.gateway.temperature);
        read(g, "max_tokens", cfg.gateway.max_tokens);
        read(g, "requests_per_minute", cfg.gateway.requests_per_minute);
    }
    if (j.contains("ingest")) {
        const json& g = j["ingest"];
        require_keys(g, "ingest", {"reviews", "metadata", "k_core", "field_map"});
        read(g, "reviews", cfg.ingest.reviews);
        read(g, "metadata", cfg.ingest.metadata);
        read(g, "k_core", cfg.ingest.k_core);
        if (g.contains("field_map")) {
            const json& fm = g["field_map"];
            require_keys(fm, "ingest.field_map",
                         {"review_user_id", "review_item_id", "review_rating", "review_title",
                          "review_text", "review_timestamp", "meta_id", "meta_title",
                          "meta_description", "meta_features", "meta_price", "meta_categories",
                          "meta_avg_rating", "meta_rating_count"});
            auto& f = cfg.ingest.field_map;
            read(fm, "review_user_id", f.review_user_id);
            read(fm, "review_item_id", f.review_item_id);
            read(fm, "review_rating", f.review_rating);
            read(fm, "review_title", f.review_title);
            read(fm, "review_text", f.review_text);
            read(fm, "review_timestamp", f.review_timestamp);
            read(fm, "meta_id", f.meta_id);
            read(fm, "meta_title", f.meta_title);
            read(fm, "meta_description", f.meta_description);
            read(fm, "meta_features", f.meta_features);
            read(fm, "meta_price", f.meta_price);
            read(fm, "meta_categories", f.meta_categories);
            read(fm, "meta_avg_rating", f.meta_avg_rating);
            read(fm, "meta_rating_count", f.meta_rating_count);
        }
    }
    if (j.contains("chat")) {
        const json& c = j["chat"];
        require_keys(c, "chat", {"budget_min", "budget_max", "profile_user_id"});
        read(c, "budget_min", cfg.chat.budget_min);
        read(c, "budget_max", cfg.chat.budget_max);
        read(c, "profile_user_id", cfg.chat.profile_user_id);
    }

    check_choice(cfg.agent_variant, "agent_variant", {"csi", "csi-no-profile", "chatcrs"});
    check_choice(cfg.simulator_mode, "simulator_mode", {"rule", "llm"});
    check_choice(cfg.memory.mode, "memory.mode", {"off", "offline", "online"});
    check_choice(cfg.memory.value, "memory.value", {"strategy", "utterance"});
    check_choice(cfg.retrieval.provider, "retrieval.provider", {"hash", "http"});
    check_choice(cfg.gateway.backend, "gateway.backend", {"live", "scripted", "null"});
    if (cfg.max_turns < 1) throw ConfigError("max_turns must be >= 1");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (cfg.memory.mode == "offline" && cfg.memory.path.empty())
        throw ConfigError("offline memory requires memory.path");

    cfg.config_hash = hash_config(j);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json j = json::parse(f, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path);
    return parse_config(j);
}

}  // namespace csales::config
