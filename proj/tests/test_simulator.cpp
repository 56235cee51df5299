#include <doctest.h>

#include <random>

#include "csales/simulator.hpp"

using namespace csales;
using dialogue::Conversation;
using dialogue::Speaker;
using profiles::DecisionStyle;
using profiles::Openness;
using simulator::RuleParams;

namespace {

catalog::Item item_with(const std::string& id, double price, const std::string& desc,
                        const std::vector<std::string>& path = {"Clothing", "Tops"}) {
    catalog::Item it;
    it.id = id;
    it.title = "Title" + id;
    it.description = desc;
    it.price = price;
    it.category_path = path;
    it.avg_rating = 4.3;
    it.rating_count = 5875;
    return it;
}

profiles::UserProfile seeker_profile(Openness o, DecisionStyle s,
                                     const std::string& needs = "warm cozy cotton soft",
                                     double lo = 20.0, double hi = 30.0) {
    profiles::UserProfile p;
    p.user_id = "u1";
    p.general_preference = "I generally prefer comfortable clothes.";
    p.dialogue_openness = o;
    p.decision_style = s;
    p.target_category_path = {"Clothing", "Tops"};
    p.target_needs = needs;
    p.reason_to_purchase = "daily wear";
    p.budget = {lo, hi};
    p.target_item_ids = {"T"};
    return p;
}

std::string mention(const catalog::Item& it) {
    return dialogue::render_item_mention(it.title, it.id);
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("opening states the literal price range") {
    auto p = seeker_profile(Openness::Active, DecisionStyle::Rational, "warm", 29.99, 31.92);
    auto r = simulator::rule_open_dialogue(p, {});
    CHECK_FALSE(r.terminal);
    CHECK(r.utterance.find("[$29.99, $31.92]") != std::string::npos);
    CHECK(r.utterance.find("warm") != std::string::npos);
    // pure function: identical twice
    CHECK(simulator::rule_open_dialogue(p, {}).utterance == r.utterance);
}

TEST_CASE("probing reveals keywords at the openness rate") {
    catalog::Catalog cat({}, {});
    RuleParams params;
    const std::string probe = "[Preference Probing] What do you prefer?";

    for (auto [openness, expected] :
         std::vector<std::pair<Openness, int>>{{Openness::Active, 3},
                                               {Openness::Neutral, 2},
                                               {Openness::Passive, 1}}) {
        auto p = seeker_profile(openness, DecisionStyle::Rational,
                                "alpha beta gamma delta epsilon zeta");
        Conversation conv;  // nothing revealed yet
        auto r = simulator::rule_respond(p, cat, conv, probe, params);
        CHECK_FALSE(r.terminal);
        int revealed = 0;
        for (const auto& kw : {"alpha", "beta", "gamma", "delta", "epsilon", "zeta"})
            if (r.utterance.find(kw) != std::string::npos) ++revealed;
        CHECK(revealed == expected);
    }
}

TEST_CASE("probing past the last keyword emits the completion marker") {
    catalog::Catalog cat({}, {});
    RuleParams params;
    auto p = seeker_profile(Openness::Active, DecisionStyle::Rational, "alpha beta");
    Conversation conv = {{Speaker::Seeker, "I care about alpha, beta."}};
    auto r = simulator::rule_respond(p, cat, conv, "[Preference Probing] Anything else?",
                                     params);
    CHECK(r.utterance.find(simulator::kNeedsCompleteMarker) != std::string::npos);
}

TEST_CASE("category questions get the exact target prefix at the requested depth") {
    catalog::Catalog cat({}, {});
    RuleParams params;
    auto p = seeker_profile(Openness::Neutral, DecisionStyle::Rational);
    auto full = simulator::rule_respond(p, cat, {}, "[Category Narrowing] Which one?", params);
    CHECK(full.utterance.find("I need Clothing > Tops products") != std::string::npos);
    auto shallow = simulator::rule_respond(
        p, cat, {}, "[Category Narrowing] Which one? (up to 1 levels)", params);
    CHECK(shallow.utterance.find("I need Clothing products") != std::string::npos);
}

TEST_CASE("a matching in-budget suggestion is bought on the spot") {
    auto good = item_with("G", 25.0, "warm cozy cotton fleece");
    catalog::Catalog cat({good}, {});
    RuleParams params;
    auto p = seeker_profile(Openness::Active, DecisionStyle::Rational);
    auto r = simulator::rule_respond(p, cat, {},
                                     "[Suggestion] Here are some items that you might like: " +
                                         mention(good) + " for $25.00.",
                                     params);
    CHECK(r.terminal);
    CHECK(r.accepted_item_id == "G");
}

TEST_CASE("a near-miss suggestion is declined pointing at the closest item") {
    auto close = item_with("C", 25.0, "warm but plain");
    auto far = item_with("F", 25.0, "totally unrelated");
    catalog::Catalog cat({close, far}, {});
    RuleParams params;
    auto p = seeker_profile(Openness::Active, DecisionStyle::Rational);
    auto r = simulator::rule_respond(p, cat, {},
                                     "[Suggestion] Here are some items that you might like: " +
                                         mention(far) + " for $25.00; " + mention(close) +
                                         " for $25.00.",
                                     params);
    CHECK_FALSE(r.terminal);
    CHECK(r.utterance.find("(C)") != std::string::npos);
    CHECK(r.utterance.find("looks closest") != std::string::npos);
}

TEST_CASE("out-of-budget persuasion follows the style map") {
    auto pricey = item_with("P", 54.50, "warm cozy cotton soft excellent");
    catalog::Catalog cat({pricey}, {});
    RuleParams params;

    const std::string social = "[Social Proof] Many buyers love " + mention(pricey) +
                               " for $54.50, rated 4.3 by 5,875 reviewers.";
    // full keyword match but wrong channel for a rational decision-maker
    auto rational = seeker_profile(Openness::Active, DecisionStyle::Rational);
    auto declined = simulator::rule_respond(rational, cat, {}, social, params);
    CHECK_FALSE(declined.terminal);
    CHECK(declined.utterance.find("concrete facts") != std::string::npos);

    auto dependent = seeker_profile(Openness::Active, DecisionStyle::Dependent);
    auto accepted = simulator::rule_respond(dependent, cat, {}, social, params);
    CHECK(accepted.terminal);
    CHECK(accepted.accepted_item_id == "P");

    const std::string logical = "[Logical Appeal] Point by point, " + mention(pricey) +
                                " at $54.50 covers your needs.";
    CHECK(simulator::rule_respond(rational, cat, {}, logical, params).terminal);
    CHECK_FALSE(simulator::rule_respond(dependent, cat, {}, logical, params).terminal);

    auto intuitive = seeker_profile(Openness::Active, DecisionStyle::Intuitive);
    const std::string emotional = "[Emotional Appeal] Imagine wearing " + mention(pricey) +
                                  " ($54.50) every day.";
    CHECK(simulator::rule_respond(intuitive, cat, {}, emotional, params).terminal);
}

TEST_CASE("framing persuades any style only at the raised threshold") {
    RuleParams params;  // theta_out 0.5, framing bonus 0.2
    auto strong = item_with("S", 54.50, "warm cozy cotton soft");        // 4/4 keywords
    auto weak = item_with("W", 54.50, "warm cozy plain basic");          // 2/4 = 0.5 < 0.7
    catalog::Catalog cat({strong, weak}, {});
    auto rational = seeker_profile(Openness::Active, DecisionStyle::Rational);

    auto win = simulator::rule_respond(rational, cat, {},
                                       "[Framing] Unlike the cheap one, " + mention(strong) +
                                           " at $54.50 stands apart.",
                                       params);
    CHECK(win.terminal);

    auto miss = simulator::rule_respond(rational, cat, {},
                                        "[Framing] Unlike the cheap one, " + mention(weak) +
                                            " at $54.50 stands apart.",
                                        params);
    CHECK_FALSE(miss.terminal);
}

TEST_CASE("rule responses are pure functions of their inputs") {
    auto pricey = item_with("P", 54.50, "warm cozy cotton soft");
    catalog::Catalog cat({pricey}, {});
    RuleParams params;
    auto p = seeker_profile(Openness::Neutral, DecisionStyle::Dependent);
    Conversation conv = {{Speaker::Seeker, "I care about warm."}};
    const std::string utterance = "[Social Proof] Buyers rave about " + mention(pricey) +
                                  " at $54.50.";
    auto a = simulator::rule_respond(p, cat, conv, utterance, params);
    auto b = simulator::rule_respond(p, cat, conv, utterance, params);
    CHECK(a.utterance == b.utterance);
    CHECK(a.terminal == b.terminal);
}

TEST_CASE("suggestions below the match threshold are never bought") {
    std::mt19937 rng(13);
    RuleParams params;
    static const char* kWords[] = {"warm", "cozy", "cotton", "soft", "light",
                                   "navy", "slim",  "boxy",  "long", "short"};
    for (int round = 0; round < 40; ++round) {
        // item shares at most 1 of 4 keywords: fraction <= 0.25 < theta_in
        std::string desc = std::string(kWords[4 + rng() % 6]) + " " + kWords[4 + rng() % 6] +
                           " " + (rng() % 2 ? "warm" : "plain");
        auto it = item_with("X", 15.0 + static_cast<double>(rng() % 100) / 10.0, desc);
        catalog::Catalog cat({it}, {});
        auto p = seeker_profile(Openness::Active, DecisionStyle::Rational);
        auto r = simulator::rule_respond(p, cat, {},
                                         "[Suggestion] Here are some items that you might "
                                         "like: " + mention(it) + " for $15.00.",
                                         params);
        CHECK_FALSE(r.terminal);
    }
}

TEST_CASE("out-of-budget acceptance is monotone in keyword coverage") {
    RuleParams params;
    auto p = seeker_profile(Openness::Active, DecisionStyle::Rational,
                            "alpha beta gamma delta");
    const std::vector<std::string> descs = {"alpha plain basic x", "alpha beta basic x",
                                            "alpha beta gamma x", "alpha beta gamma delta"};
    bool seen_accept = false;
    for (const auto& desc : descs) {  // coverage rises monotonically
        auto it = item_with("P", 99.0, desc);
        catalog::Catalog cat({it}, {});
        auto r = simulator::rule_respond(p, cat, {},
                                         "[Logical Appeal] Consider " + mention(it) +
                                             " at $99.00.",
                                         params);
        if (seen_accept) CHECK(r.terminal);  // once accepted, more coverage keeps accepting
        if (r.terminal) seen_accept = true;
    }
    CHECK(seen_accept);
}

TEST_CASE("more open seekers never trail behind over identical dialogues") {
    catalog::Catalog cat({}, {});
    RuleParams params;
    auto run = [&](Openness o) {
        auto p = seeker_profile(o, DecisionStyle::Rational,
                                "alpha beta gamma delta epsilon zeta eta theta");
        Conversation conv;
        conv.push_back({Speaker::Seeker, simulator::rule_open_dialogue(p, params).utterance});
        int revealed_total = 0;
        for (int t = 0; t < 3; ++t) {
            auto r = simulator::rule_respond(p, cat, conv, "[Preference Probing] And?", params);
            conv.push_back({Speaker::Recommender, "[Preference Probing] And?"});
            conv.push_back({Speaker::Seeker, r.utterance});
        }
        for (const auto& kw :
             {"alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta"})
            for (const auto& u : conv)
                if (u.speaker == Speaker::Seeker && u.text.find(kw) != std::string::npos) {
                    ++revealed_total;
                    break;
                }
        return revealed_total;
    };
    const int active = run(Openness::Active);
    const int neutral = run(Openness::Neutral);
    const int passive = run(Openness::Passive);
    CHECK(active >= neutral);
    CHECK(neutral >= passive);
    CHECK(active > passive);
}

TEST_CASE("prompted seeker replies parse STOP and the accepted item") {
    auto r = simulator::LlmSeeker::parse_reply(
        "I have decided to purchase <\"WEESO Womens V Neck Tops\"> (B0C4FQHKJ2). "
        "Thank you for the recommendation. STOP");
    CHECK(r.terminal);
    CHECK(r.accepted_item_id == "B0C4FQHKJ2");
    CHECK(r.utterance.find("STOP") == std::string::npos);

    auto open = simulator::LlmSeeker::parse_reply("Tell me more about the fabric, please.");
    CHECK_FALSE(open.terminal);
    CHECK_FALSE(open.accepted_item_id.has_value());

    auto lost = simulator::LlmSeeker::parse_reply("I am done here. STOP");
    CHECK(lost.terminal);
    CHECK_FALSE(lost.accepted_item_id.has_value());
}

TEST_CASE("prompted seeker plays scripted fixtures") {
    gateway::ScriptedBackend backend;
    backend.add({prompts::kSeeker, "d1", 0}, 0,
                "I want something cozy. My expected price range is: [$29.99, $31.92]");
    auto lib = prompts::PromptLibrary::builtin();
    auto p = seeker_profile(Openness::Active, DecisionStyle::Rational);
    simulator::LlmSeeker seeker(p, backend, lib, "d1");
    auto r = seeker.open_dialogue();
    CHECK_FALSE(r.terminal);
    CHECK(r.utterance.find("[$29.99, $31.92]") != std::string::npos);
}

}  // TEST_SUITE
