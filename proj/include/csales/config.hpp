#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csales/catalog.hpp"
#include "csales/common.hpp"

#include <json.hpp>

namespace csales::config {

struct RunConfig {
    std::string domain = "synthetic";
    std::string catalog_snapshot;
    std::string profiles_path;
    std::string index_snapshot;

    std::string agent_variant = "csi";    // csi | csi-no-profile | chatcrs
    std::string simulator_mode = "rule";  // rule | llm

    struct Memory {
        std::string mode = "off";        // off | offline | online
        std::string value = "utterance";  // strategy | utterance
        std::string path;
        int k = 3;
    } memory;

    struct Retrieval {
        std::string provider = "hash";  // hash | http
        int dim = 256;
        int k_suggest = 3;
        int candidate_top_k = 20;
        bool augment_query_with_path = false;
        std::string http_base_url;
        std::string http_path = "/v1/embeddings";
        std::string http_model;
        std::string api_key_env = "CSALES_API_KEY";
    } retrieval;

    struct Rule {
        double theta_in = 0.5;
        double theta_out = 0.5;
        double framing_bonus = 0.2;
        int reveal_active = 3;
        int reveal_neutral = 2;
        int reveal_passive = 1;
        std::vector<std::string> stopwords;  // empty = built-in list
    } rule;

    int max_turns = 10;
    std::uint64_t seed = 0;
    int workers = 1;

    struct Gateway {
        std::string backend = "scripted";  // live | scripted | null
        std::string fixtures;
        std::string base_url;
        std::string path = "/v1/chat/completions";
        std::string model;
        std::string api_key_env = "CSALES_API_KEY";
        double temperature = 0.0;
        int max_tokens = 1024;
        int requests_per_minute = 60;
    } gateway;

    struct Ingest {
        std::string reviews;
        std::string metadata;
        int k_core = 10;
        catalog::FieldMap field_map;
    } ingest;

    struct Chat {
        double budget_min = 0.0;
        double budget_max = 0.0;  // 0 = unknown
        std::string profile_user_id;
    } chat;

    int cohort_per_trait = 0;  // 0 = keep every profile
    std::string prompts_dir;
    std::string out_dir = "out";

    std::string config_hash;  // filled by the loader
};

// Strict parse: unknown keys anywhere are a usage error.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// stable hash over the canonical serialization
std::string hash_config(const nlohmann::json& j);

}  // namespace csales::config
