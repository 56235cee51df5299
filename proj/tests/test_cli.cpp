#include <doctest.h>

#include <sstream>

#include "csales/commands.hpp"
#include "support/temp_dir.hpp"

#include <json.hpp>

using namespace csales;
using nlohmann::json;

namespace {

std::string meta_line(int i) {
    return "{\"id\":\"I" + std::to_string(i) + "\",\"title\":\"T\",\"description\":\"d\","
           "\"features\":[],\"price\":" + std::to_string(10 + i) +
           ",\"categories\":[\"Clothing\",\"Tops\"],\"average_rating\":4.0,"
           "\"rating_number\":3}";
}

std::string review_line(int user, int item, int ts) {
    return "{\"user_id\":\"u" + std::to_string(user) + "\",\"parent_asin\":\"I" +
           std::to_string(item) + "\",\"rating\":4,\"title\":\"t\",\"text\":\"x\","
           "\"timestamp\":" + std::to_string(ts) + "}";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("configs with unknown keys or bad variants are usage errors") {
    testutil::TempDir tmp("cli");
    const auto bad_key = tmp.write("bad1.json", R"({"agent_variant":"csi","turbo":true})");
    CHECK_THROWS_AS(static_cast<void>(commands::load_with_overrides(bad_key, {})), ConfigError);

    const auto bad_variant = tmp.write("bad2.json", R"({"agent_variant":"gpt-sales"})");
    CHECK_THROWS_AS(static_cast<void>(commands::load_with_overrides(bad_variant, {})),
                    ConfigError);

    CHECK_THROWS_AS(static_cast<void>(commands::load_with_overrides(tmp.path("absent.json"), {})),
                    ConfigError);
}

TEST_CASE("cli overrides replace config values before validation") {
    testutil::TempDir tmp("cli");
    const auto path = tmp.write(
        "ok.json", R"({"agent_variant":"csi","gateway":{"backend":"null"},"seed":1})");
    commands::CliOverrides overrides;
    overrides.variant = "chatcrs";
    overrides.backend = "null";
    overrides.seed = 99;
    overrides.out_dir = tmp.path("outdir");
    auto cfg = commands::load_with_overrides(path, overrides);
    CHECK(cfg.agent_variant == "chatcrs");
    CHECK(cfg.seed == 99);
    CHECK(cfg.out_dir == tmp.path("outdir"));

    commands::CliOverrides bad;
    bad.variant = "nonsense";
    CHECK_THROWS_AS(static_cast<void>(commands::load_with_overrides(path, bad)), ConfigError);
}

TEST_CASE("ingest writes a snapshot with stats and reruns identically") {
    testutil::TempDir tmp("cli");
    std::string meta_text;
    for (int i = 0; i < 4; ++i) meta_text += meta_line(i) + "\n";
    std::string review_text;
    // two users sharing two items (2-core survives), plus a stray pair
    for (int u = 0; u < 2; ++u)
        for (int i = 0; i < 2; ++i) review_text += review_line(u, i, u * 10 + i) + "\n";
    review_text += review_line(7, 3, 99) + "\n";
    const auto meta = tmp.write("meta.jsonl", meta_text);
    const auto reviews = tmp.write("reviews.jsonl", review_text);

    json cfg_json = {{"agent_variant", "csi"},
                     {"ingest", {{"reviews", reviews}, {"metadata", meta}, {"k_core", 2}}},
                     {"out_dir", tmp.path("run1")}};
    const auto cfg_path = tmp.write("cfg.json", cfg_json.dump());

    std::ostringstream out1;
    CHECK(commands::cmd_ingest(commands::load_with_overrides(cfg_path, {}), out1) ==
          commands::kOk);
    CHECK(out1.str().find("\"interactions_kept\": 4") != std::string::npos);

    commands::CliOverrides second;
    second.out_dir = tmp.path("run2");
    std::ostringstream out2;
    CHECK(commands::cmd_ingest(commands::load_with_overrides(cfg_path, second), out2) ==
          commands::kOk);
    CHECK(testutil::slurp(tmp.path("run1") + "/catalog.jsonl") ==
          testutil::slurp(tmp.path("run2") + "/catalog.jsonl"));

    json missing = cfg_json;
    missing["ingest"]["reviews"] = tmp.path("missing.jsonl");
    const auto missing_path = tmp.write("cfg-missing.json", missing.dump());
    CHECK_THROWS_AS(
        static_cast<void>(commands::cmd_ingest(commands::load_with_overrides(missing_path, {}),
                                               out1)),
        IoError);
}

TEST_CASE("prompt export writes one file per template") {
    testutil::TempDir tmp("cli");
    std::ostringstream out;
    CHECK(commands::cmd_dump_prompts(tmp.path("prompts"), out) == commands::kOk);
    CHECK(std::filesystem::exists(tmp.path("prompts") + "/action_planning.txt"));
    CHECK(std::filesystem::exists(tmp.path("prompts") + "/seeker.txt"));
}

TEST_CASE("chat sessions classify a typed acceptance against the budget") {
    testutil::TempDir tmp("cli");
    // one-item catalog snapshot
    catalog::Item item;
    item.id = "B0C4FQHKJ2";
    item.title = "WEESO Tops";
    item.description = "soft breezy";
    item.price = 21.99;
    item.category_path = {"Clothing", "Tops"};
    catalog::Catalog cat({item}, {});
    cat.save_snapshot(tmp.path("catalog.jsonl"));
    profiles::UserProfile p;
    p.user_id = "chatuser";
    p.general_preference = "x";
    p.target_needs = "soft breezy";
    p.reason_to_purchase = "x";
    p.target_category_path = {"Clothing", "Tops"};
    p.budget = {17.75, 18.75};
    p.target_item_ids = {"B0C4FQHKJ2"};
    profiles::save_profiles({p}, tmp.path("profiles.jsonl"));

    json cfg_json = {{"agent_variant", "csi"},
                     {"catalog_snapshot", tmp.path("catalog.jsonl")},
                     {"profiles", tmp.path("profiles.jsonl")},
                     {"gateway", {{"backend", "null"}}},
                     {"chat", {{"budget_min", 17.75}, {"budget_max", 18.75}}},
                     {"out_dir", tmp.path("chat-out")}};
    const auto cfg_path = tmp.write("chat.json", cfg_json.dump());

    std::istringstream input("STOP B0C4FQHKJ2\n");
    std::ostringstream output;
    CHECK(commands::cmd_chat(commands::load_with_overrides(cfg_path, {}), input, output) ==
          commands::kOk);
    CHECK(output.str().find("AcceptedOutOfBudget") != std::string::npos);
    CHECK(std::filesystem::exists(tmp.path("chat-out") + "/chat-transcript.jsonl"));

    // EOF without a purchase
    std::istringstream empty_input("");
    std::ostringstream output2;
    commands::CliOverrides second;
    second.out_dir = tmp.path("chat-out2");
    CHECK(commands::cmd_chat(commands::load_with_overrides(cfg_path, second), empty_input,
                             output2) == commands::kOk);
    CHECK(output2.str().find("NoPurchase") != std::string::npos);
}

}  // TEST_SUITE
