#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "csales/common.hpp"

namespace csales::dialogue {

enum class Speaker { Seeker, Recommender };

struct Utterance {
    Speaker speaker;
    std::string text;
};

using Conversation = std::vector<Utterance>;

// "Seeker: ...\nRecommender: ..." — the rendering every prompt embeds.
std::string render(const Conversation& conversation);

enum class Action { PreferenceProbing, CategoryNarrowing, ItemSuggestion, Persuasion };

enum class Strategy { Framing, LogicalAppeal, EmotionalAppeal, EvidenceBased, SocialProof };

constexpr std::array<Strategy, 5> kAllStrategies = {
    Strategy::Framing, Strategy::LogicalAppeal, Strategy::EmotionalAppeal,
    Strategy::EvidenceBased, Strategy::SocialProof};

std::string action_label(Action a);      // "Preference Probing", ..., "Persuasion"
std::string strategy_label(Strategy s);  // "Logical Appeal", "Social Proof", ...

// Accepts the label spellings that appear across prompts and model output
// ("Category Search", "Item Suggestion", "Evidence-Based Approach", ...).
std::optional<Action> parse_action(const std::string& label);
std::optional<Strategy> parse_strategy(const std::string& label);

// <"Item Title"> (ITEMID)
struct ItemMention {
    std::string title;
    std::string id;
};
std::vector<ItemMention> parse_item_mentions(const std::string& text);

// "[$29.99, $31.92]" (also tolerates "[17.75, 18.75]")
std::optional<std::pair<double, double>> parse_price_range(const std::string& text);

// every "$12.34" occurrence, in order
std::vector<double> parse_prices(const std::string& text);

// Leading "[<label>]" tags mark what a recommender turn is doing; persuasion
// turns carry the strategy name as their tag. A combined turn may hold
// several tagged segments.
struct TaggedSegment {
    std::optional<Action> action;      // set for action tags
    std::optional<Strategy> strategy;  // set for strategy tags (implies Persuasion)
    std::string text;                  // segment body without the tag
};
std::vector<TaggedSegment> parse_tagged_segments(const std::string& utterance);

std::string render_item_mention(const std::string& title, const std::string& id);

}  // namespace csales::dialogue
