#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csales/catalog.hpp"
#include "csales/common.hpp"
#include "csales/gateway.hpp"
#include "csales/prompts.hpp"

namespace csales::profiles {

enum class Openness { Active, Neutral, Passive };
enum class DecisionStyle { Rational, Dependent, Intuitive };

std::string to_string(Openness o);
std::string to_string(DecisionStyle s);
Openness openness_from_label(const std::string& label);         // "Less Active" -> Neutral
DecisionStyle style_from_label(const std::string& label);

struct Budget {
    double min = 0.0;
    double max = 0.0;
};

struct UserProfile {
    std::string user_id;
    std::string general_preference;
    Openness dialogue_openness = Openness::Neutral;
    DecisionStyle decision_style = DecisionStyle::Rational;
    std::vector<std::string> target_category_path;
    std::string target_needs;
    std::string reason_to_purchase;
    Budget budget;
    std::vector<std::string> target_item_ids;
};

void validate(const UserProfile& profile);  // throws ConfigError on a bad profile

struct PurchaseAnalysis {
    struct PerItem {
        std::string purchase_reason;
        std::string decision_style_label;
    };
    std::map<std::string, PerItem> per_item;  // item id -> analysis
    DecisionStyle overall_style = DecisionStyle::Rational;
    std::string target_needs;
};

// The builder makes one structured call per profile component. Gateway and
// prompt library are injected so scripted and live runs share the code path.
class ProfileBuilder {
public:
    ProfileBuilder(gateway::Backend& backend, const prompts::PromptLibrary& prompts,
                   int max_retries = 2);

    std::string infer_general_preference(
        const std::vector<std::pair<catalog::Interaction, const catalog::Item*>>& history,
        const std::string& dialogue_id) const;

    Openness infer_dialogue_openness(
        const std::vector<std::pair<catalog::Interaction, const catalog::Item*>>& history,
        const std::string& dialogue_id) const;

    PurchaseAnalysis infer_purchase_analysis(
        const std::vector<std::pair<catalog::Interaction, const catalog::Item*>>& targets,
        const std::string& dialogue_id) const;

    // Full assembly; nullopt with `reason` set when any component fails.
    std::optional<UserProfile> assemble_profile(const catalog::UserHistory& history,
                                                std::string* reason = nullptr) const;

private:
    gateway::Backend& backend_;
    const prompts::PromptLibrary& prompts_;
    int max_retries_;
};

// [min, max] of the target prices; a single price widens by +-5% so the
// interval is never degenerate.
Budget estimate_budget(const std::vector<double>& target_prices);

// Seeded uniform sample of up to per_trait users for each of the six trait
// values, deduplicated. Deterministic under a fixed seed and independent of
// input order.
std::vector<UserProfile> sample_cohort(const std::vector<UserProfile>& profiles,
                                       std::size_t per_trait, std::uint64_t seed);

// line-delimited persistence; the contract between offline profile building
// and online evaluation
void save_profiles(const std::vector<UserProfile>& profiles, const std::string& path);
std::vector<UserProfile> load_profiles(const std::string& path);

nlohmann::json profile_to_json(const UserProfile& profile);
UserProfile profile_from_json(const nlohmann::json& j);

}  // namespace csales::profiles
