#include "csales/simulator.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "csales/retrieval.hpp"

#include <json.hpp>

namespace csales::simulator {

using dialogue::Conversation;
using dialogue::Speaker;
using nlohmann::json;

std::vector<std::string> need_keywords(const profiles::UserProfile& profile,
                                       const RuleParams& params) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& tok : tokenize(profile.target_needs)) {
        if (params.stopwords.count(tok)) continue;
        if (seen.insert(tok).second) out.push_back(tok);
    }
    return out;
}

double keyword_fraction(const std::vector<std::string>& keywords, const catalog::Item& item) {
    if (keywords.empty()) return 0.0;
    std::set<std::string> item_tokens;
    for (const auto& tok : tokenize(retrieval::embed_item_text(item))) item_tokens.insert(tok);
    std::size_t hit = 0;
    for (const auto& kw : keywords)
        if (item_tokens.count(kw)) ++hit;
    return static_cast<double>(hit) / static_cast<double>(keywords.size());
}

bool strategy_matches_style(dialogue::Strategy strategy, profiles::DecisionStyle style) {
    using dialogue::Strategy;
    using profiles::DecisionStyle;
    switch (style) {
        case DecisionStyle::Rational:
            return strategy == Strategy::LogicalAppeal || strategy == Strategy::EvidenceBased;
        case DecisionStyle::Dependent:
            return strategy == Strategy::SocialProof;
        case DecisionStyle::Intuitive:
            return strategy == Strategy::EmotionalAppeal;
    }
    return false;
}

namespace {

std::string style_hint(profiles::DecisionStyle style) {
    switch (style) {
        case profiles::DecisionStyle::Rational:
            return "I'm only convinced by concrete facts and logical comparisons.";
        case profiles::DecisionStyle::Dependent:
            return "I usually follow what other buyers say, like ratings and reviews.";
        case profiles::DecisionStyle::Intuitive:
            return "I go with how a product makes me feel.";
    }
    return "";
}

std::set<std::string> revealed_keywords(const std::vector<std::string>& keywords,
                                        const Conversation& conversation) {
    std::set<std::string> spoken;
    for (const auto& u : conversation) {
        if (u.speaker != Speaker::Seeker) continue;
        for (const auto& tok : tokenize(u.text)) spoken.insert(tok);
    }
    std::set<std::string> out;
    for (const auto& kw : keywords)
        if (spoken.count(kw)) out.insert(kw);
    return out;
}

std::optional<std::size_t> parse_requested_depth(const std::string& text) {
    const std::string lower = lowercase(text);
    const std::size_t pos = lower.find("up to ");
    if (pos == std::string::npos) return std::nullopt;
    std::size_t cursor = pos + 6;
    std::size_t depth = 0;
    bool any = false;
    while (cursor < lower.size() && std::isdigit(static_cast<unsigned char>(lower[cursor]))) {
        depth = depth * 10 + static_cast<std::size_t>(lower[cursor] - '0');
        ++cursor;
        any = true;
    }
    if (!any || lower.compare(cursor, 6, " level") != 0) return std::nullopt;
    return depth;
}

}  // namespace

SeekerResponse rule_open_dialogue(const profiles::UserProfile& profile,
                                  const RuleParams& params) {
    const auto keywords = need_keywords(profile, params);
    std::ostringstream out;
    out << "I want to find something " << (keywords.empty() ? "suitable" : keywords.front())
        << ". My expected price range is: "
        << format_price_range(profile.budget.min, profile.budget.max);
    return SeekerResponse{out.str(), false, std::nullopt};
}

SeekerResponse rule_respond(const profiles::UserProfile& profile, const catalog::Catalog& cat,
                            const Conversation& conversation,
                            const std::string& system_utterance, const RuleParams& params) {
    const auto keywords = need_keywords(profile, params);
    const auto segments = dialogue::parse_tagged_segments(system_utterance);

    // acceptance pass: a matching in-budget suggestion buys immediately
    for (const auto& seg : segments) {
        if (seg.action != dialogue::Action::ItemSuggestion) continue;
        for (const auto& mention : dialogue::parse_item_mentions(seg.text)) {
            const catalog::Item* item = cat.find(mention.id);
            if (!item) continue;
            if (keyword_fraction(keywords, *item) >= params.theta_in &&
                item->price <= profile.budget.max) {
                SeekerResponse r;
                r.utterance = dialogue::render_item_mention(item->title, item->id) +
                              " is exactly what I need. I will take it. Thank you!";
                r.terminal = true;
                r.accepted_item_id = item->id;
                return r;
            }
        }
    }

    // persuasion pass: out-of-budget offers need enough keyword coverage and
    // an argument that fits the decision style (framing carries any style at
    // a higher bar)
    std::optional<std::string> persuasion_decline;
    for (const auto& seg : segments) {
        if (!seg.strategy) continue;
        const catalog::Item* candidate = nullptr;
        for (const auto& mention : dialogue::parse_item_mentions(seg.text)) {
            const catalog::Item* item = cat.find(mention.id);
            if (item && item->price > profile.budget.max) {
                candidate = item;
                break;
            }
        }
        if (!candidate) {
            persuasion_decline = "I don't see an option there that changes my mind.";
            continue;
        }
        const double fraction = keyword_fraction(keywords, *candidate);
        const bool framing = *seg.strategy == dialogue::Strategy::Framing;
        const double threshold =
            framing ? params.theta_out + params.framing_bonus : params.theta_out;
        const bool style_ok =
            framing || strategy_matches_style(*seg.strategy, profile.decision_style);
        if (fraction >= threshold && style_ok) {
            SeekerResponse r;
            r.utterance = "That convinces me. I will take " +
                          dialogue::render_item_mention(candidate->title, candidate->id) +
                          ". Thank you!";
            r.terminal = true;
            r.accepted_item_id = candidate->id;
            return r;
        }
        if (fraction < threshold)
            persuasion_decline = "It still doesn't cover enough of what I actually need.";
        else
            persuasion_decline = "That kind of argument doesn't really work on me. " +
                                 style_hint(profile.decision_style);
    }

    // decline / answer construction
    std::vector<std::string> parts;
    for (const auto& seg : segments) {
        if (seg.action == dialogue::Action::PreferenceProbing) {
            const auto revealed = revealed_keywords(keywords, conversation);
            std::vector<std::string> fresh;
            const int rate = params.reveal_per_probe.at(profile.dialogue_openness);
            for (const auto& kw : keywords) {
                if (revealed.count(kw)) continue;
                fresh.push_back(kw);
                if (static_cast<int>(fresh.size()) >= rate) break;
            }
            if (fresh.empty()) {
                parts.push_back(kNeedsCompleteMarker);
            } else {
                std::ostringstream out;
                out << kRevealPrefix << " ";
                for (std::size_t i = 0; i < fresh.size(); ++i) {
                    if (i) out << ", ";
                    out << fresh[i];
                }
                out << ".";
                const bool all_out = revealed.size() + fresh.size() >= keywords.size();
                if (all_out) out << " " << kNeedsCompleteMarker;
                parts.push_back(out.str());
            }
        } else if (seg.action == dialogue::Action::CategoryNarrowing) {
            const auto depth = parse_requested_depth(seg.text);
            const std::size_t take =
                std::min(depth.value_or(profile.target_category_path.size()),
                         profile.target_category_path.size());
            std::ostringstream out;
            out << "I need ";
            for (std::size_t i = 0; i < take; ++i) {
                if (i) out << " > ";
                out << profile.target_category_path[i];
            }
            out << " products";
            parts.push_back(out.str());
        } else if (seg.action == dialogue::Action::ItemSuggestion) {
            // nothing matched; point at the closest miss so the seller has a
            // concrete reference
            const catalog::Item* closest = nullptr;
            double best = -1.0;
            for (const auto& mention : dialogue::parse_item_mentions(seg.text)) {
                const catalog::Item* item = cat.find(mention.id);
                if (!item) continue;
                const double f = keyword_fraction(keywords, *item);
                if (f > best) {
                    best = f;
                    closest = item;
                }
            }
            if (closest)
                parts.push_back("These aren't quite what I need. " +
                                dialogue::render_item_mention(closest->title, closest->id) +
                                " looks closest, but it's not all I'm looking for.");
            else
                parts.push_back("I don't see anything fitting there.");
        }
    }
    if (persuasion_decline) parts.push_back(*persuasion_decline);
    if (parts.empty()) {
        const auto keywordsafe = keywords.empty() ? std::string("something suitable")
                                                  : keywords.front();
        parts.push_back("Just to restate, I care about " + keywordsafe +
                        ". My expected price range is: " +
                        format_price_range(profile.budget.min, profile.budget.max));
    }

    SeekerResponse r;
    std::ostringstream joined;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) joined << " ";
        joined << parts[i];
    }
    r.utterance = joined.str();
    return r;
}

RuleSeeker::RuleSeeker(profiles::UserProfile profile, const catalog::Catalog& cat,
                       RuleParams params)
    : profile_(std::move(profile)), cat_(cat), params_(std::move(params)) {}

SeekerResponse RuleSeeker::open_dialogue() { return rule_open_dialogue(profile_, params_); }

SeekerResponse RuleSeeker::respond(const Conversation& conversation,
                                   const std::string& system_utterance) {
    return rule_respond(profile_, cat_, conversation, system_utterance, params_);
}

LlmSeeker::LlmSeeker(profiles::UserProfile profile, gateway::Backend& backend,
                     const prompts::PromptLibrary& prompts, std::string dialogue_id)
    : profile_(std::move(profile)),
      backend_(backend),
      prompts_(prompts),
      dialogue_id_(std::move(dialogue_id)) {}

SeekerResponse LlmSeeker::parse_reply(const std::string& raw) {
    SeekerResponse r;
    std::string text = raw;
    const std::size_t stop = text.find("STOP");
    if (stop != std::string::npos) {
        r.terminal = true;
        text.erase(stop, 4);
        const auto mentions = dialogue::parse_item_mentions(raw);
        if (!mentions.empty())
            r.accepted_item_id = mentions.back().id;
        else
            std::cerr << "[simulator] STOP without a parseable item id; "
                         "treating as non-purchase termination\n";
    }
    r.utterance = trim(text);
    return r;
}

SeekerResponse LlmSeeker::generate(const Conversation& conversation, int turn) {
    json profile_view = {
        {"General Preference", profile_.general_preference},
        {"Target Needs", profile_.target_needs},
        {"Category Path", profile_.target_category_path},
        {"Reason to Purchase", profile_.reason_to_purchase},
        {"Expected Price Range", format_price_range(profile_.budget.min, profile_.budget.max)},
        {"Decision-Making Style", profiles::to_string(profile_.decision_style)},
        {"Dialogue Openness", profiles::to_string(profile_.dialogue_openness)}};
    const std::string prompt = prompts_.render(
        prompts::kSeeker,
        {{"dialogue_openness", profiles::to_string(profile_.dialogue_openness)},
         {"user_profile", profile_view.dump()},
         {"conversation_history", dialogue::render(conversation)}});
    gateway::CompletionParams params;
    params.key = {prompts::kSeeker, dialogue_id_, turn};
    return parse_reply(backend_.complete({{gateway::Role::User, prompt}}, params));
}

SeekerResponse LlmSeeker::open_dialogue() { return generate({}, 0); }

SeekerResponse LlmSeeker::respond(const Conversation& conversation,
                                  const std::string& system_utterance) {
    Conversation full = conversation;
    full.push_back({Speaker::Recommender, system_utterance});
    int turn = 0;
    for (const auto& u : full)
        if (u.speaker == Speaker::Recommender) ++turn;
    return generate(full, turn);
}

}  // namespace csales::simulator
