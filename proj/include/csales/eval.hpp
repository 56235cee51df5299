#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csales/agent.hpp"
#include "csales/catalog.hpp"
#include "csales/profiles.hpp"
#include "csales/simulator.hpp"

namespace csales::eval {

enum class Outcome { AcceptedInBudget, AcceptedOutOfBudget, NoPurchase, Errored };
std::string to_string(Outcome o);

struct TranscriptTurn {
    std::string role;  // "seeker" or "agent"
    std::optional<agent::AgentTurn> agent_turn;
    std::optional<simulator::SeekerResponse> seeker_turn;
};

struct Transcript {
    std::string episode_id;
    std::string user_id;
    std::string agent_variant;
    profiles::Openness openness = profiles::Openness::Neutral;
    profiles::DecisionStyle decision_style = profiles::DecisionStyle::Rational;
    std::vector<TranscriptTurn> turns;
    Outcome outcome = Outcome::NoPurchase;
    std::optional<std::string> accepted_item_id;
    int turn_count = 0;  // recommender turns taken
    std::string config_hash;
    std::string error;  // set only for Errored
    // memory bookkeeping: profile key + winning persuasion at episode end
    std::optional<std::string> final_profile_text;
    std::optional<dialogue::Strategy> winning_strategy;
    std::optional<std::string> winning_utterance;
};

nlohmann::json transcript_to_json(const Transcript& t);
Transcript transcript_from_json(const nlohmann::json& j);

struct EpisodeConfig {
    int max_turns = 10;  // recommender turns
    std::string config_hash;
};

// Alternating loop: seeker opens, agent and seeker exchange turns until the
// seeker accepts or the cap hits. Outcome classification compares the
// accepted price with the seeker's true ceiling, not the agent's guess.
Transcript run_episode(agent::RecommenderAgent& agent_impl, simulator::Seeker& seeker,
                       const catalog::Catalog& cat, const profiles::UserProfile& truth,
                       const EpisodeConfig& config, const std::string& episode_id);

// (#accepted) / (#non-errored); errored transcripts never count anywhere
double compute_sr(const std::vector<Transcript>& transcripts);

// out-of-budget acceptances over all acceptances; empty when nobody accepted
std::optional<double> compute_swr(const std::vector<Transcript>& transcripts);

// per-openness action proportions over the four actions, each row sums to 1
std::map<profiles::Openness, std::map<dialogue::Action, double>> action_distribution(
    const std::vector<Transcript>& transcripts);

struct CellStats {
    int attempts = 0;
    int accepted = 0;
    double rate() const { return attempts ? static_cast<double>(accepted) / attempts : 0.0; }
};
// style x strategy acceptance over persuasion attempts; absent cells mean no
// attempts were made there
std::map<std::pair<profiles::DecisionStyle, dialogue::Strategy>, CellStats> strategy_acceptance(
    const std::vector<Transcript>& transcripts);

// Over users accepted by both variants: share where a's item lands closer to
// any of the user's target items (embedding distance, ties 0.5). Empty when
// no user is comparable.
std::optional<double> similarity_win_rate(const std::vector<Transcript>& variant_a,
                                          const std::vector<Transcript>& variant_b,
                                          const std::vector<profiles::UserProfile>& profiles,
                                          const retrieval::VectorIndex& index);

struct Report {
    double sr = 0.0;
    std::optional<double> swr;
    int episodes = 0;
    int errored = 0;
    std::map<std::string, std::pair<double, std::optional<double>>> per_trait;  // trait -> SR/SWR
    std::map<profiles::Openness, std::map<dialogue::Action, double>> actions_by_openness;
    std::map<std::pair<profiles::DecisionStyle, dialogue::Strategy>, CellStats> acceptance;
    std::string agent_variant;
    std::string config_hash;
    std::uint64_t seed = 0;
    int max_turns = 0;
    int memory_k = 0;
    std::string memory_mode;
};

Report build_report(const std::vector<Transcript>& transcripts, const std::string& variant,
                    const std::string& config_hash, std::uint64_t seed, int max_turns,
                    const std::string& memory_mode, int memory_k);

// transcripts.jsonl + report.json + report.csv under out_dir; returns the
// three paths. Identical inputs produce identical bytes.
std::vector<std::string> write_report(const Report& report,
                                      const std::vector<Transcript>& transcripts,
                                      const std::string& out_dir);

}  // namespace csales::eval
