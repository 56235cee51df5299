#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csales/catalog.hpp"
#include "csales/dialogue.hpp"
#include "csales/gateway.hpp"
#include "csales/memory.hpp"
#include "csales/prompts.hpp"
#include "csales/retrieval.hpp"

namespace csales::agent {

// Inferred seeker state, re-estimated every turn. price_max stays empty
// until the seeker states a ceiling; price_min defaults to 0.
struct ContextualProfile {
    std::string preference;
    std::vector<std::string> category_path;
    std::string personality;
    double price_min = 0.0;
    std::optional<double> price_max;
    std::optional<std::string> selected_item_id;
};

std::string render_profile_text(const ContextualProfile& profile);   // memory key text
nlohmann::json profile_to_json(const ContextualProfile& profile);    // prompt rendering

struct AgentTurn {
    std::string thought;
    dialogue::Action action = dialogue::Action::PreferenceProbing;
    std::string utterance;
    std::optional<dialogue::Strategy> strategy;     // iff action == Persuasion
    std::vector<std::string> shown_item_ids;
    std::optional<std::string> candidate_item_id;   // iff action == Persuasion
};

// Shared read-only services every agent variant draws on.
struct Tools {
    const catalog::Catalog* cat = nullptr;
    const retrieval::VectorIndex* index = nullptr;
    const retrieval::Embedder* embedder = nullptr;
    memory::MemoryStore* memory = nullptr;  // optional
};

struct AgentOptions {
    int suggest_k = 3;
    int candidate_top_k = 20;
    bool augment_query_with_path = false;
    int memory_k = 3;
    int json_retries = 2;
};

struct PlanOutcome {
    ContextualProfile profile;
    std::string thought;
    dialogue::Action action = dialogue::Action::PreferenceProbing;
    bool fallback = false;  // malformed planner output forced the default
};

// One structured call: thought + refreshed profile + next action. Malformed
// output after retries degrades to PreferenceProbing with the old profile.
PlanOutcome plan_turn(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                      const catalog::CategoryTree& tree, const ContextualProfile& prev_profile,
                      const dialogue::Conversation& conversation, const std::string& dialogue_id,
                      int turn, int json_retries);

// "I need A > B products" -> path extended along validated tree segments only
std::vector<std::string> extend_path_from_reply(const catalog::CategoryTree& tree,
                                                const std::vector<std::string>& current,
                                                const std::string& reply);

std::string act_preference_probe(gateway::Backend& backend,
                                 const prompts::PromptLibrary& prompts,
                                 const ContextualProfile& profile,
                                 const dialogue::Conversation& conversation,
                                 const std::string& dialogue_id, int turn);

struct NarrowOutcome {
    std::string utterance;
    bool at_leaf = false;  // nothing to narrow; caller should re-plan
};
NarrowOutcome act_category_narrow(const ContextualProfile& profile,
                                  const catalog::CategoryTree& tree);

struct SuggestOutcome {
    std::string utterance;
    std::vector<std::string> shown_item_ids;
};
// In-budget suggestions ranked by the profile query, restricted to the
// current category subtree when one is known.
SuggestOutcome act_suggest(const ContextualProfile& profile, const Tools& tools,
                           const AgentOptions& options);

// Nearest out-of-budget alternative to the selected item within the top-K
// neighborhood; empty when everything nearby is affordable.
std::optional<std::string> pick_candidate(const std::string& selected_item_id,
                                          const retrieval::VectorIndex& index,
                                          const catalog::Catalog& cat, double budget_max,
                                          int top_k);

struct PersuadeOutcome {
    dialogue::Strategy strategy = dialogue::Strategy::LogicalAppeal;
    std::string utterance;
    bool fallback = false;
};
PersuadeOutcome act_persuade(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                             const ContextualProfile& profile, const catalog::Item& selected,
                             const catalog::Item& candidate,
                             const std::vector<memory::MemoryEntry>& memory_hits,
                             const dialogue::Conversation& conversation,
                             const std::string& dialogue_id, int turn, int json_retries);

class RecommenderAgent {
public:
    virtual ~RecommenderAgent() = default;
    virtual AgentTurn take_turn(const dialogue::Conversation& conversation, int turn) = 0;
    virtual std::string variant() const = 0;
    // memory key + value source after a successful episode; empty optional
    // for variants without a profile
    virtual std::optional<std::string> profile_text() const { return std::nullopt; }
};

// Full agent: contextual profile, planned actions, tool calls, comparative
// persuasion, optional strategy memory.
class CsiAgent : public RecommenderAgent {
public:
    CsiAgent(gateway::Backend& backend, const prompts::PromptLibrary& prompts, Tools tools,
             AgentOptions options, std::string dialogue_id);

    AgentTurn take_turn(const dialogue::Conversation& conversation, int turn) override;
    std::string variant() const override { return "csi"; }
    std::optional<std::string> profile_text() const override {
        return render_profile_text(profile_);
    }
    const ContextualProfile& profile() const { return profile_; }

private:
    AgentTurn execute(dialogue::Action action, const std::string& thought,
                      const dialogue::Conversation& conversation, int turn, int replans_left);

    gateway::Backend& backend_;
    const prompts::PromptLibrary& prompts_;
    Tools tools_;
    AgentOptions options_;
    std::string dialogue_id_;
    ContextualProfile profile_;
};

// Same action space and tools, but every turn reasons from the raw
// conversation alone: budget and focus are re-extracted each time and no
// profile survives between turns.
class ReactAgent : public RecommenderAgent {
public:
    ReactAgent(gateway::Backend& backend, const prompts::PromptLibrary& prompts, Tools tools,
               AgentOptions options, std::string dialogue_id);
    AgentTurn take_turn(const dialogue::Conversation& conversation, int turn) override;
    std::string variant() const override { return "csi-no-profile"; }

private:
    gateway::Backend& backend_;
    const prompts::PromptLibrary& prompts_;
    Tools tools_;
    AgentOptions options_;
    std::string dialogue_id_;
};

// Retrieve-recommend-persuade on every turn with conversation-history
// queries; no planning, no profile.
class ChatCrsAgent : public RecommenderAgent {
public:
    ChatCrsAgent(gateway::Backend& backend, const prompts::PromptLibrary& prompts, Tools tools,
                 AgentOptions options, std::string dialogue_id);
    AgentTurn take_turn(const dialogue::Conversation& conversation, int turn) override;
    std::string variant() const override { return "chatcrs"; }

private:
    gateway::Backend& backend_;
    const prompts::PromptLibrary& prompts_;
    Tools tools_;
    AgentOptions options_;
    std::string dialogue_id_;
};

// free-function views of the baseline turns, matching the library surface
// used in tests
AgentTurn chatcrs_turn(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                       const dialogue::Conversation& conversation, const Tools& tools,
                       const AgentOptions& options, const std::string& dialogue_id, int turn);
AgentTurn react_turn(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                     const dialogue::Conversation& conversation, const Tools& tools,
                     const AgentOptions& options, const std::string& dialogue_id, int turn);

std::string render_item_info(const catalog::Item& item);

}  // namespace csales::agent
