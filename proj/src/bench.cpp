#include "csales/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "csales/run.hpp"

namespace csales::bench {

namespace fs = std::filesystem;
using nlohmann::json;
using profiles::DecisionStyle;
using profiles::Openness;

namespace {

enum class Archetype { Easy, ReactOk, CsiA, CsiB };

struct UserPlan {
    std::string user_id;
    Openness openness;
    DecisionStyle style;
    Archetype archetype;
    bool cap_bound = false;  // needs the memory-assisted first strategy to close in time
    int keyword_count = 7;
    std::vector<std::string> keywords;
    double budget_lo = 0.0;
    double budget_hi = 0.0;
    std::string leaf;
};

double round2(double v) { return std::round(v * 100.0) / 100.0; }

// pronounceable unique tokens so nothing collides with template wording
class WordMint {
public:
    explicit WordMint(std::uint64_t seed) : state_(seed) {}
    std::string next() {
        static const char* kSyllables[] = {"ba", "ce", "di", "fo", "gu", "ha", "je",
                                           "ki", "lo", "mu", "ne", "pa", "qo", "ru",
                                           "sa", "te", "vu", "wa", "xi", "zo"};
        for (;;) {
            std::string word;
            const int parts = 3 + static_cast<int>(splitmix64(state_) % 2);
            for (int i = 0; i < parts; ++i)
                word += kSyllables[splitmix64(state_) % 20];
            if (used_.insert(word).second) return word;
        }
    }

private:
    std::uint64_t state_;
    std::set<std::string> used_;
};

dialogue::Strategy matched_strategy(DecisionStyle style) {
    switch (style) {
        case DecisionStyle::Rational: return dialogue::Strategy::LogicalAppeal;
        case DecisionStyle::Dependent: return dialogue::Strategy::SocialProof;
        case DecisionStyle::Intuitive: return dialogue::Strategy::EmotionalAppeal;
    }
    return dialogue::Strategy::LogicalAppeal;
}

dialogue::Strategy first_guess_for(const std::string& dialogue_id) {
    return blind_strategy_guess(dialogue_id, 0);
}

std::vector<UserPlan> build_cohort(std::uint64_t seed) {
    struct ComboRow {
        Openness o;
        DecisionStyle s;
        std::vector<std::pair<Archetype, bool>> users;  // archetype, cap flag
    };
    const std::vector<ComboRow> layout = {
        {Openness::Active, DecisionStyle::Rational,
         {{Archetype::Easy, false}, {Archetype::CsiB, false}, {Archetype::CsiB, false},
          {Archetype::ReactOk, false}}},
        {Openness::Active, DecisionStyle::Dependent,
         {{Archetype::ReactOk, false}, {Archetype::CsiB, false}, {Archetype::CsiA, false}}},
        {Openness::Active, DecisionStyle::Intuitive,
         {{Archetype::ReactOk, false}, {Archetype::CsiB, false}, {Archetype::CsiA, false}}},
        {Openness::Neutral, DecisionStyle::Rational,
         {{Archetype::ReactOk, false}, {Archetype::CsiB, false}, {Archetype::CsiA, false}}},
        {Openness::Neutral, DecisionStyle::Dependent,
         {{Archetype::Easy, false}, {Archetype::CsiB, false}, {Archetype::ReactOk, false},
          {Archetype::CsiB, false}}},
        {Openness::Neutral, DecisionStyle::Intuitive,
         {{Archetype::ReactOk, false}, {Archetype::CsiB, false}, {Archetype::CsiA, false}}},
        {Openness::Passive, DecisionStyle::Rational,
         {{Archetype::ReactOk, false}, {Archetype::CsiB, false}, {Archetype::CsiA, false}}},
        {Openness::Passive, DecisionStyle::Dependent,
         {{Archetype::ReactOk, false}, {Archetype::CsiB, false}, {Archetype::CsiA, false}}},
        {Openness::Passive, DecisionStyle::Intuitive,
         {{Archetype::Easy, false}, {Archetype::CsiB, false}, {Archetype::CsiB, true},
          {Archetype::CsiB, true}}},
    };

    WordMint mint(seed ^ 0x5eedf00dull);
    std::vector<UserPlan> cohort;
    int index = 0;
    for (const auto& row : layout) {
        for (const auto& [archetype, cap] : row.users) {
            UserPlan u;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "u%03d", index);
            u.user_id = buf;
            u.openness = row.o;
            u.style = row.s;
            u.archetype = archetype;
            u.cap_bound = cap;
            u.keyword_count = cap ? 8 : 7;
            for (int k = 0; k < u.keyword_count; ++k) u.keywords.push_back(mint.next());
            u.budget_lo = round2(18.0 + (index % 7) * 1.25);
            u.budget_hi = round2(u.budget_lo + 6.0 + (index % 5));
            std::snprintf(buf, sizeof(buf), "Aisle%02d", index);
            u.leaf = buf;
            cohort.push_back(std::move(u));
            ++index;
        }
    }

    // a cap-bound episode must fail without memory: its blind first strategy
    // guess may not accidentally match the style
    for (auto& u : cohort) {
        if (!u.cap_bound) continue;
        const std::string base = u.user_id;
        for (int n = 0; first_guess_for("csi/" + u.user_id) == matched_strategy(u.style); ++n)
            u.user_id = base + "x" + std::to_string(n);
    }
    return cohort;
}

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += " ";
        out += words[i];
    }
    return out;
}

// keyword picks are 1-based offsets into the user's keyword list
std::vector<std::string> pick(const std::vector<std::string>& kws,
                              std::initializer_list<int> indices) {
    std::vector<std::string> out;
    for (int i : indices) out.push_back(kws[static_cast<std::size_t>(i - 1)]);
    return out;
}

struct DescPlan {
    std::vector<std::string> good;     // in-budget match, duplicated lead token for margin
    std::vector<std::string> filler;   // in-budget near-miss
    std::vector<std::string> premium;  // out-of-budget full match
    std::vector<std::string> decoy;    // out-of-budget near the fillers
};

DescPlan desc_plan(const UserPlan& u) {
    const auto& k = u.keywords;
    DescPlan d;
    switch (u.archetype) {
        case Archetype::Easy:
            d.good = pick(k, {1, 1, 2, 3, 4});
            d.filler = pick(k, {6, 7});
            d.premium = pick(k, {2, 3, 4, 5, 6, 7});
            d.decoy = pick(k, {6, 6, 6, 7, 7, 7});
            break;
        case Archetype::ReactOk:
            d.good = pick(k, {2, 2, 2, 3, 4, 5});
            d.filler = pick(k, {6, 7});
            d.premium = pick(k, {2, 3, 4, 5, 6, 7});
            d.decoy = pick(k, {6, 6, 6, 7, 7, 7});
            break;
        case Archetype::CsiA:
            d.good = pick(k, {4, 5, 5, 6, 7});
            d.filler = pick(k, {1, 2, 3});
            d.premium = pick(k, {2, 3, 4, 5, 6, 7});
            d.decoy = pick(k, {1, 1, 1, 2, 2, 2});
            break;
        case Archetype::CsiB:
            if (u.keyword_count == 8) {
                d.good = pick(k, {6, 7, 7, 8});
                d.filler = pick(k, {1, 2});
                d.premium = pick(k, {2, 3, 4, 5, 6, 7, 8});
            } else {
                d.good = pick(k, {5, 6, 6, 7});
                d.filler = pick(k, {1, 2});
                d.premium = pick(k, {2, 3, 4, 5, 6, 7});
            }
            d.decoy = pick(k, {1, 1, 1, 2, 2, 2});
            break;
    }
    return d;
}

catalog::Item make_item(const std::string& id, const std::string& title_token, double price,
                        const std::vector<std::string>& path,
                        const std::vector<std::string>& desc_tokens, int salt) {
    catalog::Item item;
    item.id = id;
    item.title = title_token;
    item.description = join(desc_tokens);
    item.price = price;
    item.category_path = path;
    item.avg_rating = round2(3.8 + (salt % 12) * 0.1);
    item.rating_count = 120 + salt * 53;
    return item;
}

}  // namespace

BenchArtifacts generate_benchmark(const BenchSpec& spec) {
    if (spec.out_dir.empty()) throw ConfigError("bench needs an output directory");
    fs::create_directories(spec.out_dir);
    fs::create_directories(fs::path(spec.out_dir) / "runs");

    const auto cohort = build_cohort(spec.seed);

    // ---- catalog ----
    std::vector<catalog::Item> items;
    std::vector<profiles::UserProfile> users;
    int item_salt = 0;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        const UserPlan& u = cohort[i];
        const DescPlan d = desc_plan(u);
        const std::vector<std::string> path = {"Clothing", u.leaf};
        char tag[16];
        std::snprintf(tag, sizeof(tag), "%02zu", i);
        const std::string t = tag;

        const std::string good_id = "U" + t + "G";
        const std::string f1_id = "U" + t + "F1";
        items.push_back(make_item(good_id, "Wearon" + t + "g", u.budget_lo, path, d.good,
                                  item_salt++));
        items.push_back(make_item(f1_id, "Wearon" + t + "f1", u.budget_hi, path, d.filler,
                                  item_salt++));
        items.push_back(make_item("U" + t + "F2", "Wearon" + t + "f2",
                                  round2(u.budget_lo + 0.8), path, d.filler, item_salt++));
        items.push_back(make_item("U" + t + "F3", "Wearon" + t + "f3",
                                  round2(u.budget_hi - 0.6), path, d.filler, item_salt++));
        items.push_back(make_item("U" + t + "P", "Wearon" + t + "p",
                                  round2(u.budget_hi * 1.5 + 2.0), path, d.premium,
                                  item_salt++));
        items.push_back(make_item("U" + t + "D", "Wearon" + t + "d",
                                  round2(u.budget_hi * 1.7 + 3.0), path, d.decoy, item_salt++));

        profiles::UserProfile p;
        p.user_id = u.user_id;
        p.general_preference = "I generally prefer pieces that feel " + u.keywords[1] +
                               " and " + u.keywords[2] + " with dependable quality.";
        p.dialogue_openness = u.openness;
        p.decision_style = u.style;
        p.target_category_path = path;
        p.target_needs = "Looking for " + join(u.keywords);
        p.reason_to_purchase = "My last purchases in this aisle worked out, and I want the "
                               "same qualities again for daily wear.";
        p.budget = profiles::estimate_budget({u.budget_lo, u.budget_hi});
        p.target_item_ids = {good_id, f1_id};
        profiles::validate(p);
        users.push_back(std::move(p));
    }
    {
        static const char* kGenericPool[] = {"everyday", "cozy",    "hardwearing", "cotton",
                                             "wardrobe", "weekend", "layerable",   "seasonal",
                                             "relaxed",  "simple",  "breezy",      "durable"};
        for (int b = 0; b < 20; ++b) {
            char tag[16];
            std::snprintf(tag, sizeof(tag), "B%03d", b);
            std::vector<std::string> desc;
            for (int w = 0; w < 6; ++w) desc.push_back(kGenericPool[(b + w * 5) % 12]);
            items.push_back(make_item(tag, std::string("Basix") + (tag + 1),
                                      round2(12.0 + b * 2.37), {"Clothing", "Basics"}, desc,
                                      item_salt++));
        }
    }

    BenchArtifacts artifacts;
    artifacts.catalog_path = (fs::path(spec.out_dir) / "catalog.jsonl").string();
    catalog::Catalog(items, {}).save_snapshot(artifacts.catalog_path);

    artifacts.profiles_path = (fs::path(spec.out_dir) / "profiles.jsonl").string();
    profiles::save_profiles(users, artifacts.profiles_path);

    // ---- memory exemplars: prior successes from sibling customers ----
    artifacts.memory_path = (fs::path(spec.out_dir) / "memory.jsonl").string();
    {
        std::ofstream f(artifacts.memory_path);
        if (!f) throw IoError("cannot write " + artifacts.memory_path);
        std::vector<const UserPlan*> b_users;
        for (const auto& u : cohort)
            if (u.archetype == Archetype::CsiB) b_users.push_back(&u);
        int written = 0;
        const int total = 50;
        for (std::size_t bi = 0; bi < b_users.size() && written < total; ++bi) {
            const UserPlan& u = *b_users[bi];
            const int copies = bi < 11 ? 4 : 3;
            for (int c = 0; c < copies && written < total; ++c) {
                std::vector<std::string> kws(u.keywords.begin(), u.keywords.begin() + 5);
                std::ostringstream profile_text;
                profile_text << "Preference: " << join(kws) << " variant" << c
                             << "; Category: Clothing > " << u.leaf
                             << "; Personality: " << profiles::to_string(u.style)
                             << " buyer; Expected Price Range: "
                             << format_price_range(u.budget_lo, u.budget_hi);
                json entry = {{"profile_text", profile_text.str()},
                              {"strategy",
                               dialogue::strategy_label(matched_strategy(u.style))},
                              {"utterance",
                               "The premium option covered every point on my list; the "
                               "difference paid for itself."},
                              {"episode_id", "warmup/" + u.user_id + "/" +
                                                 std::to_string(c)}};
                f << entry.dump() << "\n";
                ++written;
            }
        }
    }

    artifacts.fixtures_path = (fs::path(spec.out_dir) / "fixtures.jsonl").string();

    // ---- run configs (also used to drive the recording passes) ----
    auto config_json = [&](const std::string& variant, bool with_memory) {
        json j = {{"domain", "clothing-synthetic"},
                  {"catalog_snapshot", artifacts.catalog_path},
                  {"profiles", artifacts.profiles_path},
                  {"agent_variant", variant},
                  {"simulator_mode", "rule"},
                  {"retrieval",
                   {{"provider", "hash"},
                    {"dim", spec.embedding_dim},
                    {"k_suggest", spec.suggest_k},
                    {"candidate_top_k", 20}}},
                  {"max_turns", spec.max_turns},
                  {"seed", spec.seed},
                  {"workers", spec.workers},
                  {"gateway", {{"backend", "scripted"}, {"fixtures", artifacts.fixtures_path}}},
                  {"out_dir",
                   (fs::path(spec.out_dir) / "runs" / (variant + (with_memory ? "-memory" : "")))
                       .string()}};
        if (with_memory)
            j["memory"] = {{"mode", "offline"},
                           {"value", "utterance"},
                           {"path", artifacts.memory_path},
                           {"k", 3}};
        return j;
    };

    const std::vector<std::pair<std::string, json>> run_specs = {
        {"csi", config_json("csi", false)},
        {"csi-memory", config_json("csi", true)},
        {"csi-no-profile", config_json("csi-no-profile", false)},
        {"chatcrs", config_json("chatcrs", false)},
    };

    // ---- record fixtures by running each variant against the responder ----
    gateway::ScriptedBackend merged;
    for (const auto& [name, cfg_json] : run_specs) {
        config::RunConfig cfg = config::parse_config(cfg_json);
        gateway::RecordingBackend recorder(make_emulated_responder());
        auto outcome = run::run_eval(cfg, &recorder, /*write_outputs=*/false);
        merged.merge(recorder.recorded());
        artifacts.reports[name] = outcome.report;
    }
    merged.save(artifacts.fixtures_path);

    for (const auto& [name, cfg_json] : run_specs) {
        const std::string path = (fs::path(spec.out_dir) / ("config." + name + ".json")).string();
        std::ofstream f(path);
        if (!f) throw IoError("cannot write " + path);
        f << cfg_json.dump(2) << "\n";
        artifacts.config_paths[name] = path;
    }
    return artifacts;
}

}  // namespace csales::bench
