#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "csales/config.hpp"

namespace csales::commands {

// CLI exit contract: 0 success, 1 runtime failure, 2 usage/config error.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

struct CliOverrides {
    std::string out_dir;
    std::string variant;
    std::string backend;
    std::optional<std::uint64_t> seed;
};

config::RunConfig load_with_overrides(const std::string& config_path,
                                      const CliOverrides& overrides);

int cmd_ingest(const config::RunConfig& cfg, std::ostream& out);
int cmd_profiles(const config::RunConfig& cfg, std::ostream& out);
int cmd_eval(const config::RunConfig& cfg, std::ostream& out);
int cmd_chat(const config::RunConfig& cfg, std::istream& in, std::ostream& out);
int cmd_bench(const std::string& out_dir, std::uint64_t seed, std::ostream& out);
int cmd_dump_prompts(const std::string& out_dir, std::ostream& out);

}  // namespace csales::commands
