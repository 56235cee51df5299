#include <iostream>

#include <CLI11.hpp>

#include "csales/commands.hpp"

using namespace csales;

int main(int argc, char** argv) {
    CLI::App app{"Conversational sales laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    commands::CliOverrides overrides;
    std::uint64_t seed_flag = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* opt = cmd->add_option("--config", config_path, "run config JSON");
        if (config_required) opt->required();
        cmd->add_option("--out", overrides.out_dir, "output directory override");
        cmd->add_option("--seed", seed_flag, "seed override")
            ->each([&](const std::string&) { seed_set = true; });
        return cmd;
    };

    auto* ingest = add_common(app.add_subcommand("ingest", "parse and filter a raw corpus"),
                              true);
    auto* profiles_cmd = add_common(
        app.add_subcommand("profiles", "build user profiles from a catalog snapshot"), true);
    auto* eval_cmd =
        add_common(app.add_subcommand("eval", "run the evaluation loop"), true);
    eval_cmd->add_option("--variant", overrides.variant,
                         "agent variant: csi | csi-no-profile | chatcrs");
    eval_cmd->add_option("--backend", overrides.backend,
                         "gateway backend: live | scripted | null");
    auto* chat_cmd = add_common(app.add_subcommand("chat", "interactive seeker session"), true);
    chat_cmd->add_option("--variant", overrides.variant, "agent variant");
    chat_cmd->add_option("--backend", overrides.backend, "gateway backend");

    std::string bench_out = "bench";
    auto* bench_cmd =
        app.add_subcommand("bench", "generate the synthetic reference benchmark");
    bench_cmd->add_option("--out", bench_out, "benchmark output directory");
    bench_cmd->add_option("--seed", seed_flag, "benchmark seed")
        ->each([&](const std::string&) { seed_set = true; });

    std::string prompts_out = "assets/prompts";
    auto* prompts_cmd =
        app.add_subcommand("prompts", "export the built-in prompt templates");
    prompts_cmd->add_option("--out", prompts_out, "template output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? commands::kOk : commands::kUsageError;
    }

    if (seed_set) overrides.seed = seed_flag;

    try {
        if (bench_cmd->parsed())
            return commands::cmd_bench(bench_out, seed_set ? seed_flag : 42,
                                       std::cout);
        if (prompts_cmd->parsed()) return commands::cmd_dump_prompts(prompts_out, std::cout);

        auto cfg = commands::load_with_overrides(config_path, overrides);
        if (ingest->parsed()) return commands::cmd_ingest(cfg, std::cout);
        if (profiles_cmd->parsed()) return commands::cmd_profiles(cfg, std::cout);
        if (eval_cmd->parsed()) return commands::cmd_eval(cfg, std::cout);
        if (chat_cmd->parsed()) return commands::cmd_chat(cfg, std::cin, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return commands::kUsageError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return commands::kRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return commands::kRuntimeError;
    }
    return commands::kUsageError;
}
