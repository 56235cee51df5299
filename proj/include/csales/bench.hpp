#pragma once

#include <map>
#include <string>

#include "csales/eval.hpp"
#include "csales/gateway.hpp"

namespace csales::bench {

// Deterministic stand-in for a live model: parses each rendered prompt and
// produces a plausible structured reply. Used to author fixtures that the
// scripted backend replays byte for byte.
gateway::RecordingBackend::Responder make_emulated_responder();

// The responder's strategy pick when the dialogue has given it no style
// signal yet: well-mixed over the four non-framing strategies.
dialogue::Strategy blind_strategy_guess(const std::string& dialogue_id, int prior_attempts);

struct BenchSpec {
    std::string out_dir;
    std::uint64_t seed = 42;
    int suggest_k = 3;
    int max_turns = 10;
    int workers = 2;
    int embedding_dim = 8192;
};

struct BenchArtifacts {
    std::string catalog_path;
    std::string profiles_path;
    std::string memory_path;
    std::string fixtures_path;
    std::map<std::string, std::string> config_paths;  // run name -> config file
    std::map<std::string, eval::Report> reports;      // run name -> recorded report
};

// Builds the reference synthetic benchmark: a 200-item catalog, 30 rule-mode
// users uniform over the six trait values, 50 persuasion exemplars for the
// memory runs, recorded fixtures for every agent variant, and ready-to-run
// config files (csi, csi-memory, csi-no-profile, chatcrs).
BenchArtifacts generate_benchmark(const BenchSpec& spec);

}  // namespace csales::bench
