#include "csales/agent.hpp"

#include <algorithm>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

namespace csales::agent {

using dialogue::Action;
using dialogue::Conversation;
using dialogue::Speaker;
using dialogue::Strategy;
using nlohmann::json;

nlohmann::json profile_to_json(const ContextualProfile& p) {
    json range = json::array();
    range.push_back(p.price_min);
    if (p.price_max)
        range.push_back(*p.price_max);
    else
        range.push_back(nullptr);
    return json{{"Preference", p.preference},
                {"Category Path", p.category_path},
                {"Personality", p.personality},
                {"Expected Price Range", range},
                {"Selected Item ID", p.selected_item_id ? json(*p.selected_item_id) : json("")}};
}

std::string render_profile_text(const ContextualProfile& p) {
    std::ostringstream out;
    out << "Preference: " << (p.preference.empty() ? "(unknown)" : p.preference) << "; ";
    out << "Category: ";
    if (p.category_path.empty()) {
        out << "(unknown)";
    } else {
        for (std::size_t i = 0; i < p.category_path.size(); ++i) {
            if (i) out << " > ";
            out << p.category_path[i];
        }
    }
    out << "; Personality: " << (p.personality.empty() ? "(unknown)" : p.personality) << "; ";
    out << "Expected Price Range: ";
    if (p.price_max)
        out << format_price_range(p.price_min, *p.price_max);
    else
        out << "(unknown)";
    return out.str();
}

namespace {

double number_from(const json& j, double fallback) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto prices = dialogue::parse_prices("$" + j.get<std::string>());
        if (!prices.empty()) return prices.front();
    }
    return fallback;
}

std::vector<std::string> longest_valid_prefix(const catalog::CategoryTree& tree,
                                              const std::vector<std::string>& path) {
    std::vector<std::string> out;
    for (const auto& seg : path) {
        out.push_back(seg);
        if (!tree.valid_prefix(out)) {
            out.pop_back();
            break;
        }
    }
    return out;
}

std::optional<std::string> selected_from(const json& j) {
    if (!j.is_string()) return std::nullopt;
    const std::string value = trim(j.get<std::string>());
    if (value.empty() || value == "..." || lowercase(value) == "null" ||
        lowercase(value) == "none")
        return std::nullopt;
    return value;
}

ContextualProfile profile_from_plan(const json& pj, const catalog::CategoryTree& tree,
                                    const ContextualProfile& prev) {
    ContextualProfile p = prev;
    if (pj.contains("Preference") && pj["Preference"].is_string())
        p.preference = pj["Preference"].get<std::string>();
    if (pj.contains("Personality") && pj["Personality"].is_string())
        p.personality = pj["Personality"].get<std::string>();
    if (pj.contains("Category Path")) {
        std::vector<std::string> path;
        if (pj["Category Path"].is_array()) {
            for (const auto& seg : pj["Category Path"])
                if (seg.is_string() && !trim(seg.get<std::string>()).empty() &&
                    seg.get<std::string>() != "...")
                    path.push_back(seg.get<std::string>());
        } else if (pj["Category Path"].is_string()) {
            std::istringstream ss(pj["Category Path"].get<std::string>());
            std::string seg;
            while (std::getline(ss, seg, '>'))
                if (!trim(seg).empty()) path.push_back(trim(seg));
        }
        p.category_path = longest_valid_prefix(tree, path);
    }
    if (pj.contains("Expected Price Range") && pj["Expected Price Range"].is_array() &&
        pj["Expected Price Range"].size() >= 2) {
        const auto& range = pj["Expected Price Range"];
        p.price_min = number_from(range[0], 0.0);
        if (range[1].is_null())
            p.price_max = std::nullopt;
        else {
            const double hi = number_from(range[1], -1.0);
            if (hi >= 0.0) p.price_max = hi;
        }
        if (p.price_max && *p.price_max < p.price_min) std::swap(p.price_min, *p.price_max);
    }
    if (pj.contains("Selected Item ID")) {
        auto selected = selected_from(pj["Selected Item ID"]);
        if (selected) p.selected_item_id = selected;
    }
    return p;
}

}  // namespace

PlanOutcome plan_turn(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                      const catalog::CategoryTree& tree, const ContextualProfile& prev_profile,
                      const Conversation& conversation, const std::string& dialogue_id, int turn,
                      int json_retries) {
    const std::string prompt = prompts.render(
        prompts::kActionPlanning, {{"user_profile", profile_to_json(prev_profile).dump()},
                                   {"conversation_history", dialogue::render(conversation)}});
    gateway::CompletionParams params;
    params.key = {prompts::kActionPlanning, dialogue_id, turn};

    PlanOutcome out;
    try {
        json reply = gateway::complete_json(backend, {{gateway::Role::User, prompt}}, params,
                                            json_retries);
        out.thought = reply.value("Thoughts", "");
        if (reply.contains("Profile") && reply["Profile"].is_object())
            out.profile = profile_from_plan(reply["Profile"], tree, prev_profile);
        else
            out.profile = prev_profile;
        auto action = reply.contains("Action") && reply["Action"].is_string()
                          ? dialogue::parse_action(reply["Action"].get<std::string>())
                          : std::nullopt;
        if (!action) throw ParseError("unparseable action", reply.dump());
        out.action = *action;
    } catch (const ParseError& e) {
        std::cerr << "[agent] planner output unusable (" << e.what()
                  << "); falling back to preference probing\n";
        out.profile = prev_profile;
        out.thought.clear();
        out.action = Action::PreferenceProbing;
        out.fallback = true;
    }
    return out;
}

std::vector<std::string> extend_path_from_reply(const catalog::CategoryTree& tree,
                                                const std::vector<std::string>& current,
                                                const std::string& reply) {
    const std::size_t start = reply.find("I need ");
    if (start == std::string::npos) return current;
    const std::size_t end = reply.find(" products", start);
    if (end == std::string::npos) return current;
    const std::string body = reply.substr(start + 7, end - start - 7);
    std::vector<std::string> segments;
    std::string seg;
    std::istringstream ss(body);
    while (std::getline(ss, seg, '>')) {
        const std::string t = trim(seg);
        if (!t.empty()) segments.push_back(t);
    }
    if (segments.empty()) return current;
    // adopt only a reply that names real tree segments end to end
    if (!tree.valid_prefix(segments)) return current;
    return segments;
}

std::string act_preference_probe(gateway::Backend& backend,
                                 const prompts::PromptLibrary& prompts,
                                 const ContextualProfile& profile,
                                 const Conversation& conversation,
                                 const std::string& dialogue_id, int turn) {
    const std::string prompt = prompts.render(
        prompts::kPreferenceProbe, {{"user_profile", profile_to_json(profile).dump()},
                                    {"conversation_history", dialogue::render(conversation)}});
    gateway::CompletionParams params;
    params.key = {prompts::kPreferenceProbe, dialogue_id, turn};
    const std::string question = trim(backend.complete({{gateway::Role::User, prompt}}, params));
    return "[" + dialogue::action_label(Action::PreferenceProbing) + "] " + question;
}

NarrowOutcome act_category_narrow(const ContextualProfile& profile,
                                  const catalog::CategoryTree& tree) {
    const auto options = tree.children(profile.category_path);
    if (options.empty()) return {"", true};
    std::ostringstream out;
    out << "[" << dialogue::action_label(Action::CategoryNarrowing)
        << "] Which category fits best? Options: ";
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (i) out << ", ";
        out << options[i];
    }
    const std::size_t depth = tree.max_depth();
    out << ". Please answer in the form 'I need <Category Path> products' (up to "
        << depth << " levels).";
    return {out.str(), false};
}

SuggestOutcome act_suggest(const ContextualProfile& profile, const Tools& tools,
                           const AgentOptions& options) {
    std::string query = profile.preference;
    if (options.augment_query_with_path && !profile.category_path.empty()) {
        for (const auto& seg : profile.category_path) query += " " + seg;
    }

    std::vector<const catalog::Item*> picks;
    if (!trim(query).empty() && tools.index->size() > 0) {
        std::optional<std::set<std::string>> allowed;
        if (!profile.category_path.empty())
            if (tools.cat->tree().valid_prefix(profile.category_path)) {
                const auto ids = tools.cat->tree().items_under(profile.category_path);
                allowed.emplace(ids.begin(), ids.end());
            }
        const auto ranked = retrieval::query_search(*tools.index, *tools.embedder, query,
                                                    tools.index->size());
        for (const auto& hit : ranked.hits) {
            if (allowed && !allowed->count(hit.item_id)) continue;
            const catalog::Item* item = tools.cat->find(hit.item_id);
            if (!item) continue;
            if (profile.price_max && item->price > *profile.price_max) continue;
            picks.push_back(item);
            if (static_cast<int>(picks.size()) >= options.suggest_k) break;
        }
    }

    SuggestOutcome out;
    std::ostringstream text;
    text << "[" << dialogue::action_label(Action::ItemSuggestion) << "] ";
    if (picks.empty()) {
        text << "I couldn't find anything that fits yet. Could you share more about what "
                "you're looking for, or could we relax the price range?";
    } else {
        text << "Here are some items that you might like: ";
        for (std::size_t i = 0; i < picks.size(); ++i) {
            if (i) text << "; ";
            text << dialogue::render_item_mention(picks[i]->title, picks[i]->id) << " for "
                 << format_price(picks[i]->price);
            out.shown_item_ids.push_back(picks[i]->id);
        }
        text << ".";
    }
    out.utterance = text.str();
    return out;
}

std::optional<std::string> pick_candidate(const std::string& selected_item_id,
                                          const retrieval::VectorIndex& index,
                                          const catalog::Catalog& cat, double budget_max,
                                          int top_k) {
    const auto neighbors = retrieval::item_search(index, selected_item_id,
                                                  static_cast<std::size_t>(top_k));
    for (const auto& hit : neighbors.hits) {
        const catalog::Item* item = cat.find(hit.item_id);
        if (item && item->price > budget_max) return item->id;
    }
    return std::nullopt;
}

std::string render_item_info(const catalog::Item& item) {
    std::ostringstream out;
    out << dialogue::render_item_mention(item.title, item.id) << ", price "
        << format_price(item.price) << ", average rating " << item.avg_rating << " from "
        << item.rating_count << " reviews. " << item.description;
    return out.str();
}

PersuadeOutcome act_persuade(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                             const ContextualProfile& profile, const catalog::Item& selected,
                             const catalog::Item& candidate,
                             const std::vector<memory::MemoryEntry>& memory_hits,
                             const Conversation& conversation, const std::string& dialogue_id,
                             int turn, int json_retries) {
    std::string prompt = prompts.render(
        prompts::kPersuasion,
        {{"thoughts", profile.personality.empty() ? "(none)" : profile.personality},
         {"item_request", profile.preference.empty() ? "(unknown)" : profile.preference},
         {"user_personality", profile.personality.empty() ? "(unknown)" : profile.personality},
         {"selected_item_info", render_item_info(selected)},
         {"candidate_item_info", render_item_info(candidate)},
         {"conversation_history", dialogue::render(conversation)}});
    if (!memory_hits.empty()) {
        std::ostringstream extra;
        extra << "\nPersuasion records from customers with similar profiles:\n";
        for (const auto& hit : memory_hits) {
            extra << "- [" << dialogue::strategy_label(hit.strategy) << "]";
            if (hit.utterance) extra << " " << *hit.utterance;
            extra << "\n";
        }
        prompt += extra.str();
    }
    gateway::CompletionParams params;
    params.key = {prompts::kPersuasion, dialogue_id, turn};

    PersuadeOutcome out;
    std::string sentence;
    try {
        json reply = gateway::complete_json(backend, {{gateway::Role::User, prompt}}, params,
                                            json_retries);
        auto strategy = reply.contains("strategy") && reply["strategy"].is_string()
                            ? dialogue::parse_strategy(reply["strategy"].get<std::string>())
                            : std::nullopt;
        if (!strategy || !reply.contains("sentence") || !reply["sentence"].is_string())
            throw ParseError("unusable persuasion output", reply.dump());
        out.strategy = *strategy;
        sentence = reply["sentence"].get<std::string>();
    } catch (const ParseError& e) {
        std::cerr << "[agent] persuasion output unusable (" << e.what()
                  << "); using templated logical appeal\n";
        out.strategy = Strategy::LogicalAppeal;
        out.fallback = true;
        std::ostringstream text;
        text << "While " << dialogue::render_item_mention(selected.title, selected.id) << " at "
             << format_price(selected.price) << " is a fine choice, "
             << dialogue::render_item_mention(candidate.title, candidate.id) << " at "
             << format_price(candidate.price)
             << " covers your needs more completely and is worth the difference.";
        sentence = text.str();
    }

    // both items must appear in the canonical mention format so the other
    // side can always resolve ids
    auto ensure_mention = [&sentence](const catalog::Item& item) {
        if (sentence.find("(" + item.id + ")") == std::string::npos) {
            sentence += " (Compare with " +
                        dialogue::render_item_mention(item.title, item.id) + " at " +
                        format_price(item.price) + ".)";
        }
    };
    ensure_mention(selected);
    ensure_mention(candidate);

    out.utterance = "[" + dialogue::strategy_label(out.strategy) + "] " + sentence;
    return out;
}

CsiAgent::CsiAgent(gateway::Backend& backend, const prompts::PromptLibrary& prompts, Tools tools,
                   AgentOptions options, std::string dialogue_id)
    : backend_(backend),
      prompts_(prompts),
      tools_(tools),
      options_(options),
      dialogue_id_(std::move(dialogue_id)) {}

AgentTurn CsiAgent::execute(Action action, const std::string& thought,
                            const Conversation& conversation, int turn, int replans_left) {
    AgentTurn out;
    out.thought = thought;
    out.action = action;

    auto replan_or_probe = [&](const char* why) -> AgentTurn {
        if (replans_left > 0) {
            PlanOutcome plan = plan_turn(backend_, prompts_, tools_.cat->tree(), profile_,
                                         conversation, dialogue_id_, turn, options_.json_retries);
            profile_ = plan.profile;
            if (plan.action != action)
                return execute(plan.action, plan.thought, conversation, turn, replans_left - 1);
        }
        std::cerr << "[agent] " << why << "; probing instead\n";
        AgentTurn probe;
        probe.thought = thought;
        probe.action = Action::PreferenceProbing;
        probe.utterance = act_preference_probe(backend_, prompts_, profile_, conversation,
                                               dialogue_id_, turn);
        return probe;
    };

    switch (action) {
        case Action::PreferenceProbing:
            out.utterance = act_preference_probe(backend_, prompts_, profile_, conversation,
                                                 dialogue_id_, turn);
            return out;
        case Action::CategoryNarrowing: {
            auto narrowed = act_category_narrow(profile_, tools_.cat->tree());
            if (narrowed.at_leaf) return replan_or_probe("category path is already a leaf");
            out.utterance = narrowed.utterance;
            return out;
        }
        case Action::ItemSuggestion: {
            auto suggested = act_suggest(profile_, tools_, options_);
            out.utterance = suggested.utterance;
            out.shown_item_ids = suggested.shown_item_ids;
            return out;
        }
        case Action::Persuasion: {
            if (!profile_.selected_item_id || !tools_.cat->find(*profile_.selected_item_id))
                return replan_or_probe("persuasion without a selected item");
            if (!profile_.price_max)
                return replan_or_probe("persuasion without a known price ceiling");
            auto candidate_id = pick_candidate(*profile_.selected_item_id, *tools_.index,
                                               *tools_.cat, *profile_.price_max,
                                               options_.candidate_top_k);
            if (!candidate_id)
                return replan_or_probe("no out-of-budget alternative near the selected item");
            std::vector<memory::MemoryEntry> hits;
            if (tools_.memory)
                hits = tools_.memory->retrieve(render_profile_text(profile_),
                                               static_cast<std::size_t>(options_.memory_k));
            auto persuaded = act_persuade(backend_, prompts_, profile_,
                                          tools_.cat->require(*profile_.selected_item_id),
                                          tools_.cat->require(*candidate_id), hits, conversation,
                                          dialogue_id_, turn, options_.json_retries);
            out.strategy = persuaded.strategy;
            out.candidate_item_id = candidate_id;
            out.utterance = persuaded.utterance;
            return out;
        }
    }
    return out;
}

AgentTurn CsiAgent::take_turn(const Conversation& conversation, int turn) {
    PlanOutcome plan = plan_turn(backend_, prompts_, tools_.cat->tree(), profile_, conversation,
                                 dialogue_id_, turn, options_.json_retries);
    profile_ = plan.profile;
    return execute(plan.action, plan.thought, conversation, turn, 1);
}

ReactAgent::ReactAgent(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                       Tools tools, AgentOptions options, std::string dialogue_id)
    : backend_(backend),
      prompts_(prompts),
      tools_(tools),
      options_(options),
      dialogue_id_(std::move(dialogue_id)) {}

AgentTurn ReactAgent::take_turn(const Conversation& conversation, int turn) {
    return react_turn(backend_, prompts_, conversation, tools_, options_, dialogue_id_, turn);
}

AgentTurn react_turn(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                     const Conversation& conversation, const Tools& tools,
                     const AgentOptions& options, const std::string& dialogue_id, int turn) {
    const std::string prompt = prompts.render(
        prompts::kReactPlanning, {{"conversation_history", dialogue::render(conversation)}});
    gateway::CompletionParams params;
    params.key = {prompts::kReactPlanning, dialogue_id, turn};

    // scratch state for this turn only; nothing carries over
    ContextualProfile scratch;
    std::string thought;
    Action action = Action::PreferenceProbing;
    try {
        json reply =
            gateway::complete_json(backend, {{gateway::Role::User, prompt}}, params,
                                   options.json_retries);
        thought = reply.value("Thoughts", "");
        if (reply.contains("Budget") && reply["Budget"].is_array() &&
            reply["Budget"].size() >= 2) {
            scratch.price_min = number_from(reply["Budget"][0], 0.0);
            if (!reply["Budget"][1].is_null()) {
                const double hi = number_from(reply["Budget"][1], -1.0);
                if (hi >= 0.0) scratch.price_max = hi;
            }
        }
        if (reply.contains("Category Path") && reply["Category Path"].is_array()) {
            std::vector<std::string> path;
            for (const auto& seg : reply["Category Path"])
                if (seg.is_string() && !trim(seg.get<std::string>()).empty() &&
                    seg.get<std::string>() != "...")
                    path.push_back(seg.get<std::string>());
            scratch.category_path = longest_valid_prefix(tools.cat->tree(), path);
        }
        if (reply.contains("Selected Item ID"))
            scratch.selected_item_id = selected_from(reply["Selected Item ID"]);
        auto parsed = reply.contains("Action") && reply["Action"].is_string()
                          ? dialogue::parse_action(reply["Action"].get<std::string>())
                          : std::nullopt;
        if (!parsed) throw ParseError("unparseable action", reply.dump());
        action = *parsed;
    } catch (const ParseError& e) {
        std::cerr << "[agent] react planner output unusable (" << e.what() << ")\n";
        action = Action::PreferenceProbing;
    }

    AgentTurn out;
    out.thought = thought;
    out.action = action;

    if (action == Action::CategoryNarrowing) {
        auto narrowed = act_category_narrow(scratch, tools.cat->tree());
        if (!narrowed.at_leaf) {
            out.utterance = narrowed.utterance;
            return out;
        }
        action = Action::ItemSuggestion;  // leaf reached; suggest instead
        out.action = action;
    }
    if (action == Action::ItemSuggestion) {
        // queries come from the raw history, the conventional baseline trick
        scratch.preference = dialogue::render(conversation);
        auto suggested = act_suggest(scratch, tools, options);
        out.utterance = suggested.utterance;
        out.shown_item_ids = suggested.shown_item_ids;
        return out;
    }
    if (action == Action::Persuasion) {
        bool workable = scratch.selected_item_id && tools.cat->find(*scratch.selected_item_id) &&
                        scratch.price_max;
        std::optional<std::string> candidate_id;
        if (workable)
            candidate_id = pick_candidate(*scratch.selected_item_id, *tools.index, *tools.cat,
                                          *scratch.price_max, options.candidate_top_k);
        if (workable && candidate_id) {
            scratch.personality = thought;  // whatever the reasoning picked up
            auto persuaded = act_persuade(backend, prompts, scratch,
                                          tools.cat->require(*scratch.selected_item_id),
                                          tools.cat->require(*candidate_id), {}, conversation,
                                          dialogue_id, turn, options.json_retries);
            out.strategy = persuaded.strategy;
            out.candidate_item_id = candidate_id;
            out.utterance = persuaded.utterance;
            return out;
        }
        out.action = Action::PreferenceProbing;
    }
    out.utterance = act_preference_probe(backend, prompts, scratch, conversation, dialogue_id,
                                         turn);
    return out;
}

ChatCrsAgent::ChatCrsAgent(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                           Tools tools, AgentOptions options, std::string dialogue_id)
    : backend_(backend),
      prompts_(prompts),
      tools_(tools),
      options_(options),
      dialogue_id_(std::move(dialogue_id)) {}

AgentTurn ChatCrsAgent::take_turn(const Conversation& conversation, int turn) {
    return chatcrs_turn(backend_, prompts_, conversation, tools_, options_, dialogue_id_, turn);
}

AgentTurn chatcrs_turn(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                       const Conversation& conversation, const Tools& tools,
                       const AgentOptions& options, const std::string& dialogue_id, int turn) {
    AgentTurn out;

    // budget re-read from the dialogue on every turn
    std::optional<std::pair<double, double>> budget;
    for (const auto& u : conversation) {
        if (u.speaker != Speaker::Seeker) continue;
        if (auto range = dialogue::parse_price_range(u.text)) budget = range;
    }

    const std::string query = dialogue::render(conversation);
    const catalog::Item* best_in = nullptr;
    const catalog::Item* best_out = nullptr;
    if (tools.index->size() > 0 && !trim(query).empty()) {
        auto ranked = retrieval::query_search(*tools.index, *tools.embedder, query,
                                              tools.index->size());
        const double ceiling = budget ? budget->second
                                      : std::numeric_limits<double>::infinity();
        auto split = retrieval::partition_by_budget(ranked, *tools.cat, 0.0, ceiling);
        if (!split.in_budget.empty()) best_in = tools.cat->find(split.in_budget.front().item_id);
        if (!split.out_of_budget.empty())
            best_out = tools.cat->find(split.out_of_budget.front().item_id);
    }

    if (!best_in && !best_out) {
        out.action = Action::PreferenceProbing;
        out.utterance = "[" + dialogue::action_label(Action::PreferenceProbing) +
                        "] Could you tell me more about what you're looking for?";
        return out;
    }

    std::ostringstream text;
    if (best_in) {
        text << "[" << dialogue::action_label(Action::ItemSuggestion)
             << "] Here are some items that you might like: "
             << dialogue::render_item_mention(best_in->title, best_in->id) << " for "
             << format_price(best_in->price) << ".";
        out.shown_item_ids.push_back(best_in->id);
        out.action = Action::ItemSuggestion;
    }

    if (best_out && budget) {
        ContextualProfile scratch;
        scratch.price_min = budget->first;
        scratch.price_max = budget->second;
        const catalog::Item& anchor = best_in ? *best_in : *best_out;
        auto persuaded = act_persuade(backend, prompts, scratch, anchor, *best_out, {},
                                      conversation, dialogue_id, turn, options.json_retries);
        if (best_in) text << " ";
        text << persuaded.utterance;
        out.action = Action::Persuasion;
        out.strategy = persuaded.strategy;
        out.candidate_item_id = best_out->id;
    }

    out.utterance = text.str();
    return out;
}

}  // namespace csales::agent
