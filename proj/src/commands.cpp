#include "csales/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "csales/bench.hpp"
#include "csales/run.hpp"

namespace csales::commands {

namespace fs = std::filesystem;
using nlohmann::json;

config::RunConfig load_with_overrides(const std::string& config_path,
                                      const CliOverrides& overrides) {
    std::ifstream f(config_path);
    if (!f) throw ConfigError("cannot open config file: " + config_path);
    json j = json::parse(f, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + config_path);
    if (!overrides.out_dir.empty()) j["out_dir"] = overrides.out_dir;
    if (!overrides.variant.empty()) j["agent_variant"] = overrides.variant;
    if (!overrides.backend.empty()) j["gateway"]["backend"] = overrides.backend;
    if (overrides.seed) j["seed"] = *overrides.seed;
    return config::parse_config(j);
}

int cmd_ingest(const config::RunConfig& cfg, std::ostream& out) {
    if (cfg.ingest.reviews.empty() || cfg.ingest.metadata.empty())
        throw ConfigError("ingest needs ingest.reviews and ingest.metadata paths");

    auto parsed = catalog::ingest(cfg.ingest.reviews, cfg.ingest.metadata,
                                  cfg.ingest.field_map);
    const std::size_t before_core = parsed.interactions.size();
    auto kept = catalog::k_core_filter(parsed.interactions, cfg.ingest.k_core);

    // the snapshot keeps only items that survive the density filter
    std::set<std::string> live_items;
    for (const auto& in : kept) live_items.insert(in.item_id);
    std::vector<catalog::Item> items;
    for (auto& item : parsed.items)
        if (live_items.count(item.id)) items.push_back(std::move(item));

    catalog::Catalog cat(std::move(items), std::move(kept));
    fs::create_directories(cfg.out_dir);
    const std::string snapshot = (fs::path(cfg.out_dir) / "catalog.jsonl").string();
    cat.save_snapshot(snapshot);

    json stats = {{"snapshot", snapshot},
                  {"items_parsed", parsed.stats.items_parsed},
                  {"items_dropped_incomplete", parsed.stats.items_dropped_incomplete},
                  {"items_kept", cat.items().size()},
                  {"interactions_parsed", parsed.stats.interactions_parsed},
                  {"interactions_dropped", parsed.stats.interactions_dropped},
                  {"interactions_before_kcore", before_core},
                  {"interactions_kept", cat.interactions().size()},
                  {"malformed_lines", parsed.stats.malformed_lines},
                  {"k_core", cfg.ingest.k_core}};
    out << stats.dump(2) << "\n";
    std::ofstream meta(fs::path(cfg.out_dir) / "ingest-stats.json");
    meta << stats.dump(2) << "\n";
    return kOk;
}

int cmd_profiles(const config::RunConfig& cfg, std::ostream& out) {
    if (cfg.catalog_snapshot.empty())
        throw ConfigError("profiles needs catalog_snapshot");
    auto cat = catalog::Catalog::load_snapshot(cfg.catalog_snapshot);
    auto split = cat.split_all_users();

    auto backend = run::make_backend(cfg);
    auto prompt_library = cfg.prompts_dir.empty() ? prompts::PromptLibrary::builtin()
                                                  : prompts::PromptLibrary::from_dir(
                                                        cfg.prompts_dir);
    profiles::ProfileBuilder builder(*backend, prompt_library);

    std::vector<profiles::UserProfile> built;
    std::map<std::string, std::string> skipped = split.skipped;
    bool gateway_fatal = false;
    for (const auto& history : split.histories) {
        std::string reason;
        try {
            auto profile = builder.assemble_profile(history, &reason);
            if (profile)
                built.push_back(std::move(*profile));
            else
                skipped[history.user_id] = reason;
        } catch (const GatewayError& e) {
            skipped[history.user_id] = e.what();
            gateway_fatal = true;
        }
    }

    if (cfg.cohort_per_trait > 0)
        built = profiles::sample_cohort(built, static_cast<std::size_t>(cfg.cohort_per_trait),
                                        cfg.seed);

    fs::create_directories(cfg.out_dir);
    const std::string profiles_path = (fs::path(cfg.out_dir) / "profiles.jsonl").string();
    profiles::save_profiles(built, profiles_path);
    {
        std::ofstream skips(fs::path(cfg.out_dir) / "profile-skips.json");
        skips << json(skipped).dump(2) << "\n";
    }
    out << "profiles written: " << built.size() << " -> " << profiles_path << "\n";
    out << "skipped users: " << skipped.size() << "\n";
    return gateway_fatal ? kRuntimeError : kOk;
}

int cmd_eval(const config::RunConfig& cfg, std::ostream& out) {
    auto artifacts = run::run_eval(cfg);
    out << "episodes: " << artifacts.report.episodes
        << " errored: " << artifacts.report.errored << "\n";
    out << "SR: " << artifacts.report.sr << "  SWR: "
        << (artifacts.report.swr ? std::to_string(*artifacts.report.swr)
                                 : std::string("null"))
        << "\n";
    for (const auto& path : artifacts.written_files) out << "wrote " << path << "\n";
    return kOk;
}

int cmd_chat(const config::RunConfig& cfg, std::istream& in, std::ostream& out) {
    run::Services services = run::prepare_services(cfg);

    profiles::UserProfile truth;
    if (!cfg.chat.profile_user_id.empty()) {
        bool found = false;
        for (const auto& p : services.cohort)
            if (p.user_id == cfg.chat.profile_user_id) {
                truth = p;
                found = true;
            }
        if (!found)
            throw ConfigError("chat.profile_user_id not present in profiles file: " +
                              cfg.chat.profile_user_id);
    } else {
        if (cfg.chat.budget_max <= 0.0)
            throw ConfigError("chat needs chat.budget_max (or chat.profile_user_id)");
        truth.user_id = "operator";
        truth.general_preference = "interactive session";
        truth.target_needs = "interactive session";
        truth.reason_to_purchase = "interactive session";
        truth.target_category_path = {"Clothing"};
        truth.budget = {cfg.chat.budget_min, cfg.chat.budget_max};
        truth.target_item_ids = {"none"};
    }

    const std::string dialogue_id = run::dialogue_id_for(cfg, truth.user_id);
    auto agent_impl = run::make_agent(cfg, services, dialogue_id);

    eval::Transcript transcript;
    transcript.episode_id = dialogue_id;
    transcript.user_id = truth.user_id;
    transcript.agent_variant = cfg.agent_variant;
    transcript.openness = truth.dialogue_openness;
    transcript.decision_style = truth.decision_style;
    transcript.config_hash = cfg.config_hash;
    transcript.outcome = eval::Outcome::NoPurchase;

    out << "You are the seeker. Type your message; 'STOP <item id>' accepts an item; "
           "Ctrl-D ends without purchase.\n";

    dialogue::Conversation conversation;
    std::string line;
    int turn = 0;
    while (out << "seeker> " << std::flush, std::getline(in, line)) {
        if (trim(line).empty()) continue;
        simulator::SeekerResponse seeker_msg;
        if (line.rfind("STOP", 0) == 0) {
            seeker_msg.terminal = true;
            const std::string rest = trim(line.substr(4));
            if (!rest.empty()) seeker_msg.accepted_item_id = rest;
            seeker_msg.utterance = line;
            transcript.turns.push_back({"seeker", std::nullopt, seeker_msg});
            if (seeker_msg.accepted_item_id) {
                const catalog::Item* item = services.cat->find(*seeker_msg.accepted_item_id);
                if (item) {
                    transcript.accepted_item_id = seeker_msg.accepted_item_id;
                    transcript.outcome = item->price > truth.budget.max
                                             ? eval::Outcome::AcceptedOutOfBudget
                                             : eval::Outcome::AcceptedInBudget;
                } else {
                    out << "(unknown item id '" << *seeker_msg.accepted_item_id
                        << "'; recording no purchase)\n";
                }
            }
            break;
        }
        conversation.push_back({dialogue::Speaker::Seeker, line});
        seeker_msg.utterance = line;
        transcript.turns.push_back({"seeker", std::nullopt, seeker_msg});

        try {
            agent::AgentTurn agent_turn = agent_impl->take_turn(conversation, ++turn);
            conversation.push_back({dialogue::Speaker::Recommender, agent_turn.utterance});
            transcript.turns.push_back({"agent", agent_turn, std::nullopt});
            transcript.turn_count = turn;
            out << "agent[" << dialogue::action_label(agent_turn.action);
            if (agent_turn.strategy)
                out << " / " << dialogue::strategy_label(*agent_turn.strategy);
            out << "]> " << agent_turn.utterance << "\n";
        } catch (const GatewayError& e) {
            out << "(gateway failed: " << e.what() << "; ending session)\n";
            transcript.error = e.what();
            break;
        }
    }

    fs::create_directories(cfg.out_dir);
    const std::string path = (fs::path(cfg.out_dir) / "chat-transcript.jsonl").string();
    std::ofstream f(path);
    f << eval::transcript_to_json(transcript).dump() << "\n";
    out << "\noutcome: " << eval::to_string(transcript.outcome) << "; transcript saved to "
        << path << "\n";
    return kOk;
}

int cmd_bench(const std::string& out_dir, std::uint64_t seed, std::ostream& out) {
    bench::BenchSpec spec;
    spec.out_dir = out_dir;
    spec.seed = seed;
    auto artifacts = bench::generate_benchmark(spec);
    out << "benchmark written under " << out_dir << "\n";
    for (const auto& [name, report] : artifacts.reports) {
        out << "  " << name << ": SR " << report.sr << " SWR "
            << (report.swr ? std::to_string(*report.swr) : std::string("null")) << "\n";
    }
    for (const auto& [name, path] : artifacts.config_paths)
        out << "  config: " << path << "\n";
    return kOk;
}

int cmd_dump_prompts(const std::string& out_dir, std::ostream& out) {
    fs::create_directories(out_dir);
    auto lib = prompts::PromptLibrary::builtin();
    for (const auto& id : lib.ids()) {
        const std::string path = (fs::path(out_dir) / (id + ".txt")).string();
        std::ofstream f(path);
        if (!f) throw IoError("cannot write " + path);
        f << lib.text(id);
    }
    out << "templates written to " << out_dir << "\n";
    return kOk;
}

}  // namespace csales::commands
