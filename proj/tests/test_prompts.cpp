#include <doctest.h>

#include <filesystem>

#include "csales/prompts.hpp"
#include "support/temp_dir.hpp"

using namespace csales;
using prompts::PromptLibrary;

TEST_SUITE("prompts") {

TEST_CASE("builtin library carries every pipeline template") {
    auto lib = PromptLibrary::builtin();
    for (const char* id :
         {prompts::kGeneralPreference, prompts::kDialogueOpenness, prompts::kPurchaseAnalysis,
          prompts::kSeeker, prompts::kActionPlanning, prompts::kReactPlanning,
          prompts::kPreferenceProbe, prompts::kPersuasion})
        CHECK_FALSE(lib.text(id).empty());
    CHECK_THROWS_AS(static_cast<void>(lib.text("nope")), NotFoundError);
}

TEST_CASE("key instructions survive verbatim") {
    auto lib = PromptLibrary::builtin();
    CHECK(lib.text(prompts::kSeeker).find("end the conversation with STOP") !=
          std::string::npos);
    CHECK(lib.text(prompts::kSeeker).find("<\"Item Title\"> (\"Item ID\")") !=
          std::string::npos);
    CHECK(lib.text(prompts::kActionPlanning).find("minimum price (0 if not provided)") !=
          std::string::npos);
    CHECK(lib.text(prompts::kActionPlanning).find("Determine the Next \"Action\"") !=
          std::string::npos);
    CHECK(lib.text(prompts::kPersuasion).find("Select one of \"Persuasion Strategies\"") !=
          std::string::npos);
    CHECK(lib.text(prompts::kGeneralPreference).find("analyze your general preferences") !=
          std::string::npos);
    CHECK(lib.text(prompts::kDialogueOpenness)
              .find("how openly you express your opinions") != std::string::npos);
    CHECK(lib.text(prompts::kPurchaseAnalysis).find("overall decision making style") !=
          std::string::npos);
}

TEST_CASE("render fills every slot and rejects leftovers") {
    const std::string rendered = PromptLibrary::render_text(
        "Hello <<name>>, you asked about <<thing>> and again <<thing>>.",
        {{"name", "Val"}, {"thing", "socks"}});
    CHECK(rendered == "Hello Val, you asked about socks and again socks.");

    CHECK_THROWS_AS(static_cast<void>(PromptLibrary::render_text("plain", {{"name", "x"}})),
                    ConfigError);
    auto lib = PromptLibrary::builtin();
    CHECK_THROWS_AS(static_cast<void>(lib.render(prompts::kSeeker, {})), ConfigError);
}

TEST_CASE("a directory override replaces just the named template") {
    testutil::TempDir tmp("prompts");
    tmp.write("preference_probe.txt", "custom probe <<user_profile>> <<conversation_history>>");
    auto lib = PromptLibrary::from_dir(tmp.path());
    CHECK(lib.text(prompts::kPreferenceProbe).rfind("custom probe", 0) == 0);
    CHECK(lib.text(prompts::kSeeker) == PromptLibrary::builtin().text(prompts::kSeeker));
}

TEST_CASE("shipped asset files match the compiled-in templates byte for byte") {
    const std::filesystem::path assets =
        std::filesystem::path(CSALES_SOURCE_DIR) / "assets" / "prompts";
    REQUIRE(std::filesystem::exists(assets));
    auto lib = PromptLibrary::builtin();
    for (const auto& id : lib.ids()) {
        const auto file = assets / (id + ".txt");
        REQUIRE_MESSAGE(std::filesystem::exists(file), id);
        CHECK_MESSAGE(testutil::slurp(file.string()) == lib.text(id), id);
    }
}

}  // TEST_SUITE
