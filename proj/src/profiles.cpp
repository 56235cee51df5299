#include "csales/profiles.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace csales::profiles {

using nlohmann::json;

std::string to_string(Openness o) {
    switch (o) {
        case Openness::Active: return "Active";
        case Openness::Neutral: return "Neutral";
        case Openness::Passive: return "Passive";
    }
    return "Neutral";
}

std::string to_string(DecisionStyle s) {
    switch (s) {
        case DecisionStyle::Rational: return "Rational";
        case DecisionStyle::Dependent: return "Dependent";
        case DecisionStyle::Intuitive: return "Intuitive";
    }
    return "Rational";
}

Openness openness_from_label(const std::string& label) {
    const std::string t = lowercase(trim(label));
    if (t == "active") return Openness::Active;
    if (t == "neutral" || t == "less active") return Openness::Neutral;
    if (t == "passive") return Openness::Passive;
    throw ParseError("unknown dialogue openness label", label);
}

DecisionStyle style_from_label(const std::string& label) {
    const std::string t = lowercase(trim(label));
    if (t == "rational") return DecisionStyle::Rational;
    if (t == "dependent") return DecisionStyle::Dependent;
    if (t == "intuitive") return DecisionStyle::Intuitive;
    throw ParseError("unknown decision-making style label", label);
}

void validate(const UserProfile& p) {
    if (p.user_id.empty()) throw ConfigError("profile missing user_id");
    if (p.general_preference.empty())
        throw ConfigError("profile missing general_preference: " + p.user_id);
    if (p.target_needs.empty()) throw ConfigError("profile missing target_needs: " + p.user_id);
    if (p.reason_to_purchase.empty())
        throw ConfigError("profile missing reason_to_purchase: " + p.user_id);
    if (p.target_category_path.empty())
        throw ConfigError("profile missing target_category_path: " + p.user_id);
    if (p.budget.min > p.budget.max)
        throw ConfigError("profile budget min exceeds max: " + p.user_id);
    if (p.target_item_ids.empty())
        throw ConfigError("profile missing target_item_ids: " + p.user_id);
}

namespace {

std::string render_history_block(
    const std::vector<std::pair<catalog::Interaction, const catalog::Item*>>& entries,
    bool with_description) {
    std::ostringstream out;
    int n = 0;
    for (const auto& [interaction, item] : entries) {
        out << "   - Item " << ++n << " : " << item->id;
        if (with_description) out << ", " << item->description;
        out << ", rating " << interaction.rating << ", " << interaction.review_title << ", "
            << interaction.review_body << "\n";
    }
    return out.str();
}

gateway::CompletionParams params_for(const std::string& template_id,
                                     const std::string& dialogue_id) {
    gateway::CompletionParams params;
    params.key = {template_id, dialogue_id, 0};
    return params;
}

}  // namespace

ProfileBuilder::ProfileBuilder(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                               int max_retries)
    : backend_(backend), prompts_(prompts), max_retries_(max_retries) {}

std::string ProfileBuilder::infer_general_preference(
    const std::vector<std::pair<catalog::Interaction, const catalog::Item*>>& history,
    const std::string& dialogue_id) const {
    if (history.empty()) throw ConfigError("general preference needs a non-empty history");
    const std::string prompt = prompts_.render(
        prompts::kGeneralPreference, {{"purchased_items", render_history_block(history, true)}});
    json reply = gateway::complete_json(backend_, {{gateway::Role::User, prompt}},
                                        params_for(prompts::kGeneralPreference, dialogue_id),
                                        max_retries_);
    if (!reply.contains("general preference") || !reply["general preference"].is_string())
        throw ParseError("missing 'general preference' key", reply.dump());
    return reply["general preference"].get<std::string>();
}

Openness ProfileBuilder::infer_dialogue_openness(
    const std::vector<std::pair<catalog::Interaction, const catalog::Item*>>& history,
    const std::string& dialogue_id) const {
    if (history.empty()) throw ConfigError("dialogue openness needs at least one review");
    const std::string prompt = prompts_.render(
        prompts::kDialogueOpenness, {{"reviews", render_history_block(history, false)}});
    json reply = gateway::complete_json(backend_, {{gateway::Role::User, prompt}},
                                        params_for(prompts::kDialogueOpenness, dialogue_id),
                                        max_retries_);
    if (!reply.contains("dialogue_openness") || !reply["dialogue_openness"].is_string())
        throw ParseError("missing 'dialogue_openness' key", reply.dump());
    return openness_from_label(reply["dialogue_openness"].get<std::string>());
}

PurchaseAnalysis ProfileBuilder::infer_purchase_analysis(
    const std::vector<std::pair<catalog::Interaction, const catalog::Item*>>& targets,
    const std::string& dialogue_id) const {
    if (targets.empty()) throw ConfigError("purchase analysis needs non-empty targets");
    const std::string prompt = prompts_.render(
        prompts::kPurchaseAnalysis, {{"target_items", render_history_block(targets, true)}});
    json reply = gateway::complete_json(backend_, {{gateway::Role::User, prompt}},
                                        params_for(prompts::kPurchaseAnalysis, dialogue_id),
                                        max_retries_);
    if (!reply.contains("analysis") || !reply["analysis"].is_object())
        throw ParseError("missing 'analysis' key", reply.dump());
    if (!reply.contains("overall decision making style"))
        throw ParseError("missing 'overall decision making style' key", reply.dump());
    if (!reply.contains("target needs"))
        throw ParseError("missing 'target needs' key", reply.dump());

    PurchaseAnalysis out;
    for (const auto& [item_id, entry] : reply["analysis"].items()) {
        PurchaseAnalysis::PerItem per;
        per.purchase_reason = entry.value("purchase reason", "");
        per.decision_style_label = entry.value("decision making style", "");
        out.per_item[item_id] = std::move(per);
    }
    // per-item labels may disagree with the overall verdict; the overall one
    // is authoritative and stored as-is
    out.overall_style =
        style_from_label(reply["overall decision making style"].get<std::string>());
    out.target_needs = reply["target needs"].get<std::string>();
    return out;
}

std::optional<UserProfile> ProfileBuilder::assemble_profile(const catalog::UserHistory& history,
                                                            std::string* reason) const {
    try {
        UserProfile p;
        p.user_id = history.user_id;
        p.general_preference = infer_general_preference(history.history_items, history.user_id);
        p.dialogue_openness = infer_dialogue_openness(history.history_items, history.user_id);
        auto analysis = infer_purchase_analysis(history.target_items, history.user_id);
        p.decision_style = analysis.overall_style;
        p.target_needs = analysis.target_needs;
        {
            // purchase reasons concatenated in target order
            std::string joined;
            for (const auto& [interaction, item] : history.target_items) {
                auto it = analysis.per_item.find(item->id);
                if (it == analysis.per_item.end() || it->second.purchase_reason.empty()) continue;
                if (!joined.empty()) joined += " ";
                joined += it->second.purchase_reason;
            }
            p.reason_to_purchase = joined;
        }
        p.target_category_path = history.target_category_path;
        std::vector<double> prices;
        for (const auto& [interaction, item] : history.target_items) {
            prices.push_back(item->price);
            p.target_item_ids.push_back(item->id);
        }
        p.budget = estimate_budget(prices);
        validate(p);
        return p;
    } catch (const Error& e) {
        if (reason) *reason = e.what();
        return std::nullopt;
    }
}

Budget estimate_budget(const std::vector<double>& target_prices) {
    if (target_prices.empty()) throw ConfigError("estimate_budget needs at least one price");
    const auto [lo, hi] = std::minmax_element(target_prices.begin(), target_prices.end());
    Budget b{*lo, *hi};
    if (b.min == b.max) {
        b.min *= 0.95;
        b.max *= 1.05;
    }
    return b;
}

std::vector<UserProfile> sample_cohort(const std::vector<UserProfile>& profiles,
                                       std::size_t per_trait, std::uint64_t seed) {
    if (per_trait < 1) throw ConfigError("per_trait must be >= 1");

    // index by user id so the sample is independent of input order
    std::vector<const UserProfile*> sorted;
    sorted.reserve(profiles.size());
    for (const auto& p : profiles) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(),
              [](const UserProfile* a, const UserProfile* b) { return a->user_id < b->user_id; });

    auto sample_trait = [&](const std::string& trait_tag, auto&& predicate,
                            std::set<std::string>& picked) {
        std::vector<const UserProfile*> pool;
        for (const auto* p : sorted)
            if (predicate(*p)) pool.push_back(p);
        // per-trait seed stream keeps traits independent of each other
        std::uint64_t state = seed ^ fnv1a64(trait_tag);
        const std::size_t want = std::min(per_trait, pool.size());
        for (std::size_t i = 0; i < want; ++i) {
            const std::size_t j = i + splitmix64(state) % (pool.size() - i);
            std::swap(pool[i], pool[j]);
            picked.insert(pool[i]->user_id);
        }
    };

    std::set<std::string> picked;
    for (Openness o : {Openness::Active, Openness::Neutral, Openness::Passive})
        sample_trait("openness:" + to_string(o),
                     [o](const UserProfile& p) { return p.dialogue_openness == o; }, picked);
    for (DecisionStyle s :
         {DecisionStyle::Rational, DecisionStyle::Dependent, DecisionStyle::Intuitive})
        sample_trait("style:" + to_string(s),
                     [s](const UserProfile& p) { return p.decision_style == s; }, picked);

    std::vector<UserProfile> out;
    for (const auto* p : sorted)
        if (picked.count(p->user_id)) out.push_back(*p);
    return out;
}

json profile_to_json(const UserProfile& p) {
    return json{{"schema_version", 1},
                {"user_id", p.user_id},
                {"general_preference", p.general_preference},
                {"dialogue_openness", to_string(p.dialogue_openness)},
                {"decision_style", to_string(p.decision_style)},
                {"target_category_path", p.target_category_path},
                {"target_needs", p.target_needs},
                {"reason_to_purchase", p.reason_to_purchase},
                {"budget", {p.budget.min, p.budget.max}},
                {"target_item_ids", p.target_item_ids}};
}

UserProfile profile_from_json(const json& j) {
    if (j.value("schema_version", 0) != 1)
        throw IoError("unsupported profile schema version");
    UserProfile p;
    p.user_id = j.at("user_id").get<std::string>();
    p.general_preference = j.at("general_preference").get<std::string>();
    p.dialogue_openness = openness_from_label(j.at("dialogue_openness").get<std::string>());
    p.decision_style = style_from_label(j.at("decision_style").get<std::string>());
    p.target_category_path = j.at("target_category_path").get<std::vector<std::string>>();
    p.target_needs = j.at("target_needs").get<std::string>();
    p.reason_to_purchase = j.at("reason_to_purchase").get<std::string>();
    p.budget.min = j.at("budget").at(0).get<double>();
    p.budget.max = j.at("budget").at(1).get<double>();
    p.target_item_ids = j.at("target_item_ids").get<std::vector<std::string>>();
    validate(p);
    return p;
}

void save_profiles(const std::vector<UserProfile>& profiles, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write profiles file: " + path);
    for (const auto& p : profiles) f << profile_to_json(p).dump() << "\n";
}

std::vector<UserProfile> load_profiles(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open profiles file: " + path);
    std::vector<UserProfile> out;
    std::string line;
    while (std::getline(f, line)) {
        if (trim(line).empty()) continue;
        out.push_back(profile_from_json(json::parse(line)));
    }
    return out;
}

}  // namespace csales::profiles
