#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csales/catalog.hpp"
#include "csales/dialogue.hpp"
#include "csales/gateway.hpp"
#include "csales/profiles.hpp"
#include "csales/prompts.hpp"

namespace csales::simulator {

struct SeekerResponse {
    std::string utterance;  // stop marker already stripped
    bool terminal = false;
    std::optional<std::string> accepted_item_id;  // present iff a purchase happened
};

struct RuleParams {
    double theta_in = 0.5;
    double theta_out = 0.5;
    double framing_bonus = 0.2;  // framing persuades any style, at theta_out + bonus
    std::map<profiles::Openness, int> reveal_per_probe = {
        {profiles::Openness::Active, 3},
        {profiles::Openness::Neutral, 2},
        {profiles::Openness::Passive, 1}};
    std::set<std::string> stopwords = {"a",   "an",  "and", "for", "i",    "in",  "is",
                                       "it",  "my",  "of",  "on",  "that", "the", "to",
                                       "with", "want", "need", "looking", "something"};
};

// phrase revealed keywords are wrapped in so both rule and emulated parties
// can find them
inline constexpr const char* kRevealPrefix = "I care about";
inline constexpr const char* kNeedsCompleteMarker = "That's everything I'm looking for.";

// need keywords: tokenized target_needs minus stopwords, order-preserving
std::vector<std::string> need_keywords(const profiles::UserProfile& profile,
                                       const RuleParams& params);

// share of a user's need keywords present in the item's indexed text
double keyword_fraction(const std::vector<std::string>& keywords, const catalog::Item& item);

bool strategy_matches_style(dialogue::Strategy strategy, profiles::DecisionStyle style);

// Deterministic seeker policy. Pure in (profile, conversation, utterance,
// params): no hidden state, so identical inputs give identical responses.
SeekerResponse rule_respond(const profiles::UserProfile& profile,
                            const catalog::Catalog& cat,
                            const dialogue::Conversation& conversation,
                            const std::string& system_utterance, const RuleParams& params);

SeekerResponse rule_open_dialogue(const profiles::UserProfile& profile,
                                  const RuleParams& params);

class Seeker {
public:
    virtual ~Seeker() = default;
    virtual SeekerResponse open_dialogue() = 0;
    // `conversation` holds every turn before `system_utterance`
    virtual SeekerResponse respond(const dialogue::Conversation& conversation,
                                   const std::string& system_utterance) = 0;
};

class RuleSeeker : public Seeker {
public:
    RuleSeeker(profiles::UserProfile profile, const catalog::Catalog& cat, RuleParams params);
    SeekerResponse open_dialogue() override;
    SeekerResponse respond(const dialogue::Conversation& conversation,
                           const std::string& system_utterance) override;

    const profiles::UserProfile& profile() const { return profile_; }

private:
    profiles::UserProfile profile_;
    const catalog::Catalog& cat_;
    RuleParams params_;
};

// Prompted seeker; deterministic only with a scripted backend.
class LlmSeeker : public Seeker {
public:
    LlmSeeker(profiles::UserProfile profile, gateway::Backend& backend,
              const prompts::PromptLibrary& prompts, std::string dialogue_id);
    SeekerResponse open_dialogue() override;
    SeekerResponse respond(const dialogue::Conversation& conversation,
                           const std::string& system_utterance) override;

    // STOP handling shared with tests: strips the marker, flags terminal,
    // extracts the last mentioned item id
    static SeekerResponse parse_reply(const std::string& raw);

private:
    SeekerResponse generate(const dialogue::Conversation& conversation, int turn);
    profiles::UserProfile profile_;
    gateway::Backend& backend_;
    const prompts::PromptLibrary& prompts_;
    std::string dialogue_id_;
};

}  // namespace csales::simulator
