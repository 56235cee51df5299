#pragma once

#include <memory>

#include "csales/config.hpp"
#include "csales/eval.hpp"
#include "csales/gateway.hpp"
#include "csales/memory.hpp"

namespace csales::run {

// Everything a run needs, owned together so lifetimes stay simple.
struct Services {
    std::unique_ptr<catalog::Catalog> cat;
    std::vector<profiles::UserProfile> cohort;
    std::unique_ptr<retrieval::Embedder> embedder;
    std::unique_ptr<retrieval::VectorIndex> index;
    std::unique_ptr<memory::MemoryStore> memory_store;  // null when memory is off
    std::unique_ptr<gateway::Backend> owned_backend;     // null when injected
    gateway::Backend* backend = nullptr;
    prompts::PromptLibrary prompt_library;
    simulator::RuleParams rule_params;
};

Services prepare_services(const config::RunConfig& cfg,
                          gateway::Backend* backend_override = nullptr);

std::unique_ptr<gateway::Backend> make_backend(const config::RunConfig& cfg);

simulator::RuleParams rule_params_from(const config::RunConfig& cfg);

std::unique_ptr<agent::RecommenderAgent> make_agent(const config::RunConfig& cfg,
                                                    Services& services,
                                                    const std::string& dialogue_id);

// per-episode fixture namespace: "<variant>[+mem]/<user_id>"
std::string dialogue_id_for(const config::RunConfig& cfg, const std::string& user_id);

struct EvalArtifacts {
    std::vector<eval::Transcript> transcripts;
    eval::Report report;
    std::vector<std::string> written_files;
};

// Full evaluation over the configured cohort. Episodes run on a worker pool
// (online memory forces sequential order so inserts replay identically);
// outputs land under cfg.out_dir when write_outputs is set.
EvalArtifacts run_eval(const config::RunConfig& cfg,
                       gateway::Backend* backend_override = nullptr,
                       bool write_outputs = true);

}  // namespace csales::run
