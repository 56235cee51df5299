#include <doctest.h>

#include <random>

#include "csales/profiles.hpp"
#include "support/temp_dir.hpp"

using namespace csales;
using profiles::DecisionStyle;
using profiles::Openness;
using profiles::UserProfile;

namespace {

// history entries for the builder; items owned by the fixture
struct HistoryFixture {
    std::vector<catalog::Item> items;
    std::vector<std::pair<catalog::Interaction, const catalog::Item*>> entries;

    void add(const std::string& id, double price, const std::string& review) {
        catalog::Item it;
        it.id = id;
        it.title = "Title " + id;
        it.description = "Desc " + id;
        it.price = price;
        it.category_path = {"Clothing", "Tops"};
        items.push_back(std::move(it));
    }
    void link() {
        for (const auto& item : items) {
            catalog::Interaction in;
            in.user_id = "u1";
            in.item_id = item.id;
            in.rating = 5;
            in.review_title = "t";
            in.review_body = "body about " + item.id;
            entries.emplace_back(std::move(in), &item);
        }
    }
};

UserProfile profile_with(const std::string& id, Openness o, DecisionStyle s) {
    UserProfile p;
    p.user_id = id;
    p.general_preference = "I generally prefer things.";
    p.dialogue_openness = o;
    p.decision_style = s;
    p.target_category_path = {"Clothing"};
    p.target_needs = "needs";
    p.reason_to_purchase = "reason";
    p.budget = {10, 20};
    p.target_item_ids = {"x"};
    return p;
}

}  // namespace

TEST_SUITE("profiles") {

TEST_CASE("openness labels normalize; unknown labels are rejected") {
    CHECK(profiles::openness_from_label("Active") == Openness::Active);
    CHECK(profiles::openness_from_label("Less Active") == Openness::Neutral);
    CHECK(profiles::openness_from_label("Neutral") == Openness::Neutral);
    CHECK(profiles::openness_from_label("passive") == Openness::Passive);
    CHECK_THROWS_AS(static_cast<void>(profiles::openness_from_label("Chatty")), ParseError);
}

TEST_CASE("estimate_budget spans the observed target prices") {
    auto b1 = profiles::estimate_budget({29.99, 31.92});
    CHECK(b1.min == doctest::Approx(29.99));
    CHECK(b1.max == doctest::Approx(31.92));

    auto b2 = profiles::estimate_budget({17.75, 18.75});
    CHECK(b2.min == doctest::Approx(17.75));
    CHECK(b2.max == doctest::Approx(18.75));

    auto single = profiles::estimate_budget({20.00});
    CHECK(single.min == doctest::Approx(19.00));
    CHECK(single.max == doctest::Approx(21.00));

    CHECK_THROWS_AS(static_cast<void>(profiles::estimate_budget({})), ConfigError);
}

TEST_CASE("estimate_budget scales with the prices") {
    std::mt19937 rng(3);
    for (int round = 0; round < 20; ++round) {
        std::vector<double> prices;
        for (int i = 0; i < 1 + static_cast<int>(rng() % 6); ++i)
            prices.push_back(1.0 + static_cast<double>(rng() % 10000) / 100.0);
        const double c = 0.5 + static_cast<double>(rng() % 40) / 10.0;
        std::vector<double> scaled;
        for (double p : prices) scaled.push_back(p * c);
        auto base = profiles::estimate_budget(prices);
        auto stretched = profiles::estimate_budget(scaled);
        CHECK(stretched.min == doctest::Approx(base.min * c));
        CHECK(stretched.max == doctest::Approx(base.max * c));
    }
}

TEST_CASE("general preference comes from the documented key") {
    HistoryFixture fx;
    fx.add("A", 10, "nice");
    fx.link();
    gateway::ScriptedBackend backend;
    backend.add({prompts::kGeneralPreference, "u1", 0}, 0,
                R"({"general preference":"I generally prefer soft fabrics."})");
    auto lib = prompts::PromptLibrary::builtin();
    profiles::ProfileBuilder builder(backend, lib, 0);
    CHECK(builder.infer_general_preference(fx.entries, "u1") ==
          "I generally prefer soft fabrics.");
}

TEST_CASE("general preference with a missing key fails after retries") {
    HistoryFixture fx;
    fx.add("A", 10, "nice");
    fx.link();
    gateway::ScriptedBackend backend;
    backend.add({prompts::kGeneralPreference, "u1", 0}, 0, R"({"wrong_key":"x"})");
    auto lib = prompts::PromptLibrary::builtin();
    profiles::ProfileBuilder builder(backend, lib, 0);
    CHECK_THROWS_AS(static_cast<void>(builder.infer_general_preference(fx.entries, "u1")),
                    ParseError);
}

TEST_CASE("openness inference normalizes Less Active") {
    HistoryFixture fx;
    fx.add("A", 10, "short");
    fx.link();
    gateway::ScriptedBackend backend;
    backend.add({prompts::kDialogueOpenness, "u1", 0}, 0,
                R"({"dialogue_openness":"Less Active"})");
    auto lib = prompts::PromptLibrary::builtin();
    profiles::ProfileBuilder builder(backend, lib, 0);
    CHECK(builder.infer_dialogue_openness(fx.entries, "u1") == Openness::Neutral);
}

TEST_CASE("purchase analysis parses per-item and aggregate fields") {
    HistoryFixture fx;
    fx.add("A", 10, "r1");
    fx.add("B", 12, "r2");
    fx.link();
    gateway::ScriptedBackend backend;
    backend.add({prompts::kPurchaseAnalysis, "u1", 0}, 0, R"({
        "analysis": {
            "A": {"purchase reason": "liked the fit", "decision making style": "Rational"},
            "B": {"purchase reason": "matched my kit", "decision making style": "Intuitive"}
        },
        "overall decision making style": "Rational",
        "target needs": "warm layering pieces"
    })");
    auto lib = prompts::PromptLibrary::builtin();
    profiles::ProfileBuilder builder(backend, lib, 0);
    auto analysis = builder.infer_purchase_analysis(fx.entries, "u1");
    CHECK(analysis.per_item.size() == 2);
    CHECK(analysis.per_item.at("A").purchase_reason == "liked the fit");
    // per-item disagreement is fine; the overall verdict is what sticks
    CHECK(analysis.overall_style == DecisionStyle::Rational);
    CHECK(analysis.target_needs == "warm layering pieces");

    gateway::ScriptedBackend missing;
    missing.add({prompts::kPurchaseAnalysis, "u1", 0}, 0, R"({"analysis": {}})");
    profiles::ProfileBuilder builder2(missing, lib, 0);
    CHECK_THROWS_AS(static_cast<void>(builder2.infer_purchase_analysis(fx.entries, "u1")),
                    ParseError);
}

TEST_CASE("assemble_profile wires every component together") {
    // history in one category, targets in another
    HistoryFixture fx;
    fx.add("H1", 9, "old");
    fx.items[0].category_path = {"Clothing", "Shoes"};
    fx.add("T1", 29.99, "new");
    fx.add("T2", 31.92, "newer");
    fx.link();

    catalog::UserHistory history;
    history.user_id = "u1";
    history.target_category_path = {"Clothing", "Tops"};
    history.history_items = {fx.entries[0]};
    history.target_items = {fx.entries[1], fx.entries[2]};

    gateway::ScriptedBackend backend;
    backend.add({prompts::kGeneralPreference, "u1", 0}, 0,
                R"({"general preference":"I generally prefer cozy knits."})");
    backend.add({prompts::kDialogueOpenness, "u1", 0}, 0,
                R"({"dialogue_openness":"Active"})");
    backend.add({prompts::kPurchaseAnalysis, "u1", 0}, 0, R"({
        "analysis": {
            "T1": {"purchase reason": "winter warmth.", "decision making style": "Rational"},
            "T2": {"purchase reason": "versatile color.", "decision making style": "Rational"}
        },
        "overall decision making style": "Rational",
        "target needs": "warm cozy versatile tops"
    })");
    auto lib = prompts::PromptLibrary::builtin();
    profiles::ProfileBuilder builder(backend, lib, 0);
    auto profile = builder.assemble_profile(history);
    REQUIRE(profile.has_value());
    CHECK(profile->dialogue_openness == Openness::Active);
    CHECK(profile->decision_style == DecisionStyle::Rational);
    CHECK(profile->budget.min == doctest::Approx(29.99));
    CHECK(profile->budget.max == doctest::Approx(31.92));
    CHECK(profile->reason_to_purchase == "winter warmth. versatile color.");
    CHECK(profile->target_item_ids == std::vector<std::string>{"T1", "T2"});

    // losing one fixture skips the user with a reason
    gateway::ScriptedBackend partial;
    partial.add({prompts::kGeneralPreference, "u1", 0}, 0,
                R"({"general preference":"I generally prefer cozy knits."})");
    profiles::ProfileBuilder builder2(partial, lib, 0);
    std::string reason;
    CHECK_FALSE(builder2.assemble_profile(history, &reason).has_value());
    CHECK_FALSE(reason.empty());
}

TEST_CASE("profiles persist through the line-delimited file") {
    testutil::TempDir tmp("profiles");
    std::vector<UserProfile> cohort = {
        profile_with("u1", Openness::Active, DecisionStyle::Rational),
        profile_with("u2", Openness::Passive, DecisionStyle::Intuitive)};
    const auto path = tmp.path("profiles.jsonl");
    profiles::save_profiles(cohort, path);
    auto loaded = profiles::load_profiles(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].user_id == "u1");
    CHECK(loaded[1].dialogue_openness == Openness::Passive);
    CHECK(loaded[1].decision_style == DecisionStyle::Intuitive);
}

TEST_CASE("sample_cohort covers each trait deterministically") {
    std::vector<UserProfile> population;
    const Openness opennesses[] = {Openness::Active, Openness::Neutral, Openness::Passive};
    const DecisionStyle styles[] = {DecisionStyle::Rational, DecisionStyle::Dependent,
                                    DecisionStyle::Intuitive};
    for (int i = 0; i < 600; ++i)
        population.push_back(profile_with("u" + std::to_string(1000 + i), opennesses[i % 3],
                                          styles[(i / 3) % 3]));

    auto cohort = profiles::sample_cohort(population, 150, 99);
    auto again = profiles::sample_cohort(population, 150, 99);
    REQUIRE(cohort.size() == again.size());
    for (std::size_t i = 0; i < cohort.size(); ++i)
        CHECK(cohort[i].user_id == again[i].user_id);

    for (Openness o : opennesses) {
        int count = 0;
        for (const auto& p : cohort)
            if (p.dialogue_openness == o) ++count;
        CHECK(count >= 150);
    }

    // order of the input population must not matter
    auto shuffled = population;
    std::mt19937 rng(4);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto from_shuffled = profiles::sample_cohort(shuffled, 150, 99);
    REQUIRE(from_shuffled.size() == cohort.size());
    for (std::size_t i = 0; i < cohort.size(); ++i)
        CHECK(from_shuffled[i].user_id == cohort[i].user_id);
}

TEST_CASE("sample_cohort with per_trait one keeps six distinct-trait users") {
    std::vector<UserProfile> population = {
        profile_with("a", Openness::Active, DecisionStyle::Rational),
        profile_with("b", Openness::Neutral, DecisionStyle::Dependent),
        profile_with("c", Openness::Passive, DecisionStyle::Intuitive),
        profile_with("d", Openness::Active, DecisionStyle::Dependent),
        profile_with("e", Openness::Neutral, DecisionStyle::Intuitive),
        profile_with("f", Openness::Passive, DecisionStyle::Rational)};
    auto cohort = profiles::sample_cohort(population, 1, 7);
    CHECK(cohort.size() == 6);
}

}  // TEST_SUITE
