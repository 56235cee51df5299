#include "csales/run.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace csales::run {

using nlohmann::json;

simulator::RuleParams rule_params_from(const config::RunConfig& cfg) {
    simulator::RuleParams params;
    params.theta_in = cfg.rule.theta_in;
    params.theta_out = cfg.rule.theta_out;
    params.framing_bonus = cfg.rule.framing_bonus;
    params.reveal_per_probe = {{profiles::Openness::Active, cfg.rule.reveal_active},
                               {profiles::Openness::Neutral, cfg.rule.reveal_neutral},
                               {profiles::Openness::Passive, cfg.rule.reveal_passive}};
    if (!cfg.rule.stopwords.empty())
        params.stopwords = {cfg.rule.stopwords.begin(), cfg.rule.stopwords.end()};
    return params;
}

std::unique_ptr<gateway::Backend> make_backend(const config::RunConfig& cfg) {
    if (cfg.gateway.backend == "scripted") {
        if (cfg.gateway.fixtures.empty())
            throw ConfigError("scripted backend requires gateway.fixtures");
        return gateway::ScriptedBackend::from_file(cfg.gateway.fixtures);
    }
    if (cfg.gateway.backend == "null") return std::make_unique<gateway::NullBackend>();
    gateway::LiveBackendConfig live;
    live.base_url = cfg.gateway.base_url;
    live.path = cfg.gateway.path;
    live.model = cfg.gateway.model;
    live.requests_per_minute = cfg.gateway.requests_per_minute;
    if (const char* key = std::getenv(cfg.gateway.api_key_env.c_str())) live.api_key = key;
    return std::make_unique<gateway::LiveBackend>(live);
}

std::string dialogue_id_for(const config::RunConfig& cfg, const std::string& user_id) {
    std::string tag = cfg.agent_variant;
    if (cfg.memory.mode != "off") tag += "+mem";
    return tag + "/" + user_id;
}

Services prepare_services(const config::RunConfig& cfg, gateway::Backend* backend_override) {
    Services s;
    if (cfg.catalog_snapshot.empty()) throw ConfigError("config needs catalog_snapshot");
    s.cat = std::make_unique<catalog::Catalog>(
        catalog::Catalog::load_snapshot(cfg.catalog_snapshot));

    if (cfg.profiles_path.empty()) throw ConfigError("config needs profiles");
    s.cohort = profiles::load_profiles(cfg.profiles_path);

    retrieval::HttpEmbedderConfig http;
    http.base_url = cfg.retrieval.http_base_url;
    http.path = cfg.retrieval.http_path;
    http.model = cfg.retrieval.http_model;
    if (const char* key = std::getenv(cfg.retrieval.api_key_env.c_str())) http.api_key = key;
    s.embedder = retrieval::make_embedder(cfg.retrieval.provider,
                                          static_cast<std::size_t>(cfg.retrieval.dim), http);

    if (!cfg.index_snapshot.empty())
        s.index = std::make_unique<retrieval::VectorIndex>(
            retrieval::VectorIndex::load(cfg.index_snapshot));
    else
        s.index = std::make_unique<retrieval::VectorIndex>(
            retrieval::VectorIndex::build(*s.cat, *s.embedder));

    if (cfg.memory.mode != "off") {
        const auto mode = cfg.memory.value == "strategy" ? memory::ValueMode::StrategyOnly
                                                         : memory::ValueMode::FullUtterance;
        s.memory_store = std::make_unique<memory::MemoryStore>(*s.embedder, mode);
        if (cfg.memory.mode == "offline") s.memory_store->preload(cfg.memory.path);
    }

    if (backend_override) {
        s.backend = backend_override;
    } else {
        s.owned_backend = make_backend(cfg);
        s.backend = s.owned_backend.get();
    }

    s.prompt_library = cfg.prompts_dir.empty()
                           ? prompts::PromptLibrary::builtin()
                           : prompts::PromptLibrary::from_dir(cfg.prompts_dir);
    s.rule_params = rule_params_from(cfg);
    return s;
}

std::unique_ptr<agent::RecommenderAgent> make_agent(const config::RunConfig& cfg,
                                                    Services& services,
                                                    const std::string& dialogue_id) {
    agent::Tools tools;
    tools.cat = services.cat.get();
    tools.index = services.index.get();
    tools.embedder = services.embedder.get();
    tools.memory = services.memory_store.get();

    agent::AgentOptions options;
    options.suggest_k = cfg.retrieval.k_suggest;
    options.candidate_top_k = cfg.retrieval.candidate_top_k;
    options.augment_query_with_path = cfg.retrieval.augment_query_with_path;
    options.memory_k = cfg.memory.k;

    if (cfg.agent_variant == "csi")
        return std::make_unique<agent::CsiAgent>(*services.backend, services.prompt_library,
                                                 tools, options, dialogue_id);
    if (cfg.agent_variant == "csi-no-profile") {
        tools.memory = nullptr;  // baselines run memoryless
        return std::make_unique<agent::ReactAgent>(*services.backend, services.prompt_library,
                                                   tools, options, dialogue_id);
    }
    tools.memory = nullptr;
    return std::make_unique<agent::ChatCrsAgent>(*services.backend, services.prompt_library,
                                                 tools, options, dialogue_id);
}

namespace {

std::unique_ptr<simulator::Seeker> make_seeker(const config::RunConfig& cfg, Services& services,
                                               const profiles::UserProfile& profile,
                                               const std::string& dialogue_id) {
    if (cfg.simulator_mode == "rule")
        return std::make_unique<simulator::RuleSeeker>(profile, *services.cat,
                                                       services.rule_params);
    return std::make_unique<simulator::LlmSeeker>(profile, *services.backend,
                                                  services.prompt_library, dialogue_id);
}

void write_run_meta(const config::RunConfig& cfg, const Services& services,
                    const EvalArtifacts& artifacts) {
    json meta = {{"agent_variant", cfg.agent_variant},
                 {"simulator_mode", cfg.simulator_mode},
                 {"backend", services.backend->name()},
                 {"deterministic", services.backend->deterministic() &&
                                       cfg.simulator_mode == "rule"},
                 {"episodes", artifacts.transcripts.size()},
                 {"errored", artifacts.report.errored},
                 {"seed", cfg.seed},
                 {"config_hash", cfg.config_hash},
                 {"max_turns", cfg.max_turns},
                 {"workers", cfg.workers},
                 {"memory_mode", cfg.memory.mode},
                 {"memory_value", cfg.memory.value},
                 {"memory_k", cfg.memory.k},
                 {"embedding_provider", services.embedder->name()},
                 {"embedding_dim", services.embedder->dim()}};
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f(std::filesystem::path(cfg.out_dir) / "run-meta.json");
    f << meta.dump(2) << "\n";
}

}  // namespace

EvalArtifacts run_eval(const config::RunConfig& cfg, gateway::Backend* backend_override,
                       bool write_outputs) {
    Services services = prepare_services(cfg, backend_override);

    std::vector<profiles::UserProfile> cohort = services.cohort;
    std::sort(cohort.begin(), cohort.end(),
              [](const auto& a, const auto& b) { return a.user_id < b.user_id; });

    eval::EpisodeConfig episode_config;
    episode_config.max_turns = cfg.max_turns;
    episode_config.config_hash = cfg.config_hash;

    const bool online_memory = cfg.memory.mode == "online";
    // online inserts must land in episode order, so that mode is sequential
    const int workers = online_memory ? 1 : std::max(1, cfg.workers);

    std::vector<eval::Transcript> transcripts(cohort.size());
    auto run_one = [&](std::size_t i) {
        const auto& profile = cohort[i];
        const std::string dialogue_id = dialogue_id_for(cfg, profile.user_id);
        auto agent_impl = make_agent(cfg, services, dialogue_id);
        auto seeker = make_seeker(cfg, services, profile, dialogue_id);
        transcripts[i] = eval::run_episode(*agent_impl, *seeker, *services.cat, profile,
                                           episode_config, dialogue_id);
        if (online_memory && services.memory_store &&
            transcripts[i].outcome == eval::Outcome::AcceptedOutOfBudget &&
            transcripts[i].final_profile_text && transcripts[i].winning_strategy) {
            services.memory_store->insert(*transcripts[i].final_profile_text,
                                          *transcripts[i].winning_strategy,
                                          transcripts[i].winning_utterance,
                                          transcripts[i].episode_id);
        }
    };

    if (workers == 1) {
        for (std::size_t i = 0; i < cohort.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cohort.size()) return;
                    run_one(i);
                }
            });
        for (auto& th : pool) th.join();
    }

    EvalArtifacts artifacts;
    artifacts.transcripts = std::move(transcripts);
    artifacts.report =
        eval::build_report(artifacts.transcripts, cfg.agent_variant, cfg.config_hash, cfg.seed,
                           cfg.max_turns, cfg.memory.mode, cfg.memory.k);
    if (write_outputs) {
        artifacts.written_files =
            eval::write_report(artifacts.report, artifacts.transcripts, cfg.out_dir);
        write_run_meta(cfg, services, artifacts);
    }
    return artifacts;
}

}  // namespace csales::run
