#include "csales/eval.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace csales::eval {

using dialogue::Action;
using dialogue::Strategy;
using nlohmann::json;

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::AcceptedInBudget: return "AcceptedInBudget";
        case Outcome::AcceptedOutOfBudget: return "AcceptedOutOfBudget";
        case Outcome::NoPurchase: return "NoPurchase";
        case Outcome::Errored: return "Errored";
    }
    return "NoPurchase";
}

namespace {

Outcome outcome_from_string(const std::string& s) {
    if (s == "AcceptedInBudget") return Outcome::AcceptedInBudget;
    if (s == "AcceptedOutOfBudget") return Outcome::AcceptedOutOfBudget;
    if (s == "Errored") return Outcome::Errored;
    return Outcome::NoPurchase;
}

bool accepted(Outcome o) {
    return o == Outcome::AcceptedInBudget || o == Outcome::AcceptedOutOfBudget;
}

constexpr std::array<Action, 4> kAllActions = {Action::PreferenceProbing,
                                               Action::CategoryNarrowing,
                                               Action::ItemSuggestion, Action::Persuasion};

}  // namespace

json transcript_to_json(const Transcript& t) {
    json turns = json::array();
    for (const auto& turn : t.turns) {
        json j = {{"role", turn.role}};
        if (turn.agent_turn) {
            const auto& a = *turn.agent_turn;
            j["thought"] = a.thought;
            j["action"] = dialogue::action_label(a.action);
            j["utterance"] = a.utterance;
            if (a.strategy) j["strategy"] = dialogue::strategy_label(*a.strategy);
            j["shown_item_ids"] = a.shown_item_ids;
            if (a.candidate_item_id) j["candidate_item_id"] = *a.candidate_item_id;
        }
        if (turn.seeker_turn) {
            const auto& s = *turn.seeker_turn;
            j["utterance"] = s.utterance;
            j["terminal"] = s.terminal;
            if (s.accepted_item_id) j["accepted_item_id"] = *s.accepted_item_id;
        }
        turns.push_back(std::move(j));
    }
    json out = {{"episode_id", t.episode_id},
                {"user_id", t.user_id},
                {"agent_variant", t.agent_variant},
                {"openness", profiles::to_string(t.openness)},
                {"decision_style", profiles::to_string(t.decision_style)},
                {"turns", turns},
                {"outcome", to_string(t.outcome)},
                {"turn_count", t.turn_count},
                {"config_hash", t.config_hash}};
    if (t.accepted_item_id) out["accepted_item_id"] = *t.accepted_item_id;
    if (!t.error.empty()) out["error"] = t.error;
    return out;
}

Transcript transcript_from_json(const json& j) {
    Transcript t;
    t.episode_id = j.at("episode_id").get<std::string>();
    t.user_id = j.at("user_id").get<std::string>();
    t.agent_variant = j.at("agent_variant").get<std::string>();
    t.openness = profiles::openness_from_label(j.at("openness").get<std::string>());
    t.decision_style = profiles::style_from_label(j.at("decision_style").get<std::string>());
    t.outcome = outcome_from_string(j.at("outcome").get<std::string>());
    t.turn_count = j.at("turn_count").get<int>();
    t.config_hash = j.value("config_hash", "");
    if (j.contains("accepted_item_id")) t.accepted_item_id = j["accepted_item_id"];
    t.error = j.value("error", "");
    for (const auto& turn_json : j.value("turns", json::array())) {
        TranscriptTurn turn;
        turn.role = turn_json.value("role", "");
        if (turn.role == "agent") {
            agent::AgentTurn a;
            a.thought = turn_json.value("thought", "");
            if (auto act = dialogue::parse_action(turn_json.value("action", "")))
                a.action = *act;
            a.utterance = turn_json.value("utterance", "");
            if (turn_json.contains("strategy"))
                a.strategy = dialogue::parse_strategy(turn_json["strategy"].get<std::string>());
            a.shown_item_ids = turn_json.value("shown_item_ids", std::vector<std::string>{});
            if (turn_json.contains("candidate_item_id"))
                a.candidate_item_id = turn_json["candidate_item_id"];
            turn.agent_turn = std::move(a);
        } else {
            simulator::SeekerResponse s;
            s.utterance = turn_json.value("utterance", "");
            s.terminal = turn_json.value("terminal", false);
            if (turn_json.contains("accepted_item_id"))
                s.accepted_item_id = turn_json["accepted_item_id"];
            turn.seeker_turn = std::move(s);
        }
        t.turns.push_back(std::move(turn));
    }
    return t;
}

Transcript run_episode(agent::RecommenderAgent& agent_impl, simulator::Seeker& seeker,
                       const catalog::Catalog& cat, const profiles::UserProfile& truth,
                       const EpisodeConfig& config, const std::string& episode_id) {
    Transcript t;
    t.episode_id = episode_id;
    t.user_id = truth.user_id;
    t.agent_variant = agent_impl.variant();
    t.openness = truth.dialogue_openness;
    t.decision_style = truth.decision_style;
    t.config_hash = config.config_hash;

    dialogue::Conversation conversation;
    try {
        simulator::SeekerResponse opening = seeker.open_dialogue();
        conversation.push_back({dialogue::Speaker::Seeker, opening.utterance});
        t.turns.push_back({"seeker", std::nullopt, opening});

        std::optional<simulator::SeekerResponse> closing;
        for (int turn = 1; turn <= config.max_turns; ++turn) {
            agent::AgentTurn agent_turn = agent_impl.take_turn(conversation, turn);
            t.turns.push_back({"agent", agent_turn, std::nullopt});
            t.turn_count = turn;

            simulator::SeekerResponse reply = seeker.respond(conversation, agent_turn.utterance);
            conversation.push_back({dialogue::Speaker::Recommender, agent_turn.utterance});
            t.turns.push_back({"seeker", std::nullopt, reply});

            if (reply.terminal) {
                closing = reply;
                if (reply.accepted_item_id && agent_turn.action == Action::Persuasion &&
                    agent_turn.candidate_item_id == reply.accepted_item_id) {
                    t.winning_strategy = agent_turn.strategy;
                    t.winning_utterance = agent_turn.utterance;
                }
                break;
            }
            conversation.push_back({dialogue::Speaker::Seeker, reply.utterance});
        }

        if (closing && closing->accepted_item_id) {
            const catalog::Item* item = cat.find(*closing->accepted_item_id);
            if (!item) {
                std::cerr << "[eval] accepted item " << *closing->accepted_item_id
                          << " not in catalog; treating as no purchase\n";
                t.outcome = Outcome::NoPurchase;
            } else {
                t.accepted_item_id = closing->accepted_item_id;
                t.outcome = item->price > truth.budget.max ? Outcome::AcceptedOutOfBudget
                                                           : Outcome::AcceptedInBudget;
            }
        } else {
            t.outcome = Outcome::NoPurchase;
        }
        t.final_profile_text = agent_impl.profile_text();
    } catch (const GatewayError& e) {
        t.outcome = Outcome::Errored;
        t.error = e.what();
    }
    return t;
}

double compute_sr(const std::vector<Transcript>& transcripts) {
    int total = 0;
    int wins = 0;
    for (const auto& t : transcripts) {
        if (t.outcome == Outcome::Errored) continue;
        ++total;
        if (accepted(t.outcome)) ++wins;
    }
    if (total == 0) throw ConfigError("compute_sr needs at least one non-errored transcript");
    return static_cast<double>(wins) / total;
}

std::optional<double> compute_swr(const std::vector<Transcript>& transcripts) {
    int acceptances = 0;
    int out_of_budget = 0;
    for (const auto& t : transcripts) {
        if (t.outcome == Outcome::Errored) continue;
        if (!accepted(t.outcome)) continue;
        ++acceptances;
        if (t.outcome == Outcome::AcceptedOutOfBudget) ++out_of_budget;
    }
    if (acceptances == 0) return std::nullopt;
    return static_cast<double>(out_of_budget) / acceptances;
}

std::map<profiles::Openness, std::map<Action, double>> action_distribution(
    const std::vector<Transcript>& transcripts) {
    std::map<profiles::Openness, std::map<Action, int>> counts;
    for (const auto& t : transcripts) {
        if (t.outcome == Outcome::Errored) continue;
        for (const auto& turn : t.turns)
            if (turn.agent_turn) counts[t.openness][turn.agent_turn->action]++;
    }
    std::map<profiles::Openness, std::map<Action, double>> out;
    for (const auto& [openness, per_action] : counts) {
        int total = 0;
        for (const auto& [_, n] : per_action) total += n;
        if (total == 0) continue;
        for (Action a : kAllActions) {
            const auto it = per_action.find(a);
            out[openness][a] = it == per_action.end()
                                   ? 0.0
                                   : static_cast<double>(it->second) / total;
        }
    }
    return out;
}

std::map<std::pair<profiles::DecisionStyle, Strategy>, CellStats> strategy_acceptance(
    const std::vector<Transcript>& transcripts) {
    std::map<std::pair<profiles::DecisionStyle, Strategy>, CellStats> out;
    for (const auto& t : transcripts) {
        if (t.outcome == Outcome::Errored) continue;
        for (std::size_t i = 0; i < t.turns.size(); ++i) {
            const auto& turn = t.turns[i];
            if (!turn.agent_turn || turn.agent_turn->action != Action::Persuasion) continue;
            if (!turn.agent_turn->strategy || !turn.agent_turn->candidate_item_id) continue;
            auto& cell = out[{t.decision_style, *turn.agent_turn->strategy}];
            cell.attempts++;
            // credited when the very next seeker reply buys the candidate
            if (i + 1 < t.turns.size() && t.turns[i + 1].seeker_turn &&
                t.turns[i + 1].seeker_turn->terminal &&
                t.turns[i + 1].seeker_turn->accepted_item_id ==
                    turn.agent_turn->candidate_item_id)
                cell.accepted++;
        }
    }
    return out;
}

std::optional<double> similarity_win_rate(const std::vector<Transcript>& variant_a,
                                          const std::vector<Transcript>& variant_b,
                                          const std::vector<profiles::UserProfile>& profiles,
                                          const retrieval::VectorIndex& index) {
    std::map<std::string, const Transcript*> by_user_a;
    std::map<std::string, const Transcript*> by_user_b;
    for (const auto& t : variant_a)
        if (accepted(t.outcome)) by_user_a[t.user_id] = &t;
    for (const auto& t : variant_b)
        if (accepted(t.outcome)) by_user_b[t.user_id] = &t;

    auto min_target_distance = [&](const std::string& accepted_id,
                                   const profiles::UserProfile& p) {
        const retrieval::Vector& accepted_vec = index.vector_of(accepted_id);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& target_id : p.target_item_ids)
            if (index.contains(target_id))
                best = std::min(best,
                                retrieval::squared_distance(accepted_vec,
                                                            index.vector_of(target_id)));
        return best;
    };

    double wins = 0.0;
    int comparable = 0;
    for (const auto& p : profiles) {
        auto a = by_user_a.find(p.user_id);
        auto b = by_user_b.find(p.user_id);
        if (a == by_user_a.end() || b == by_user_b.end()) continue;
        if (!a->second->accepted_item_id || !b->second->accepted_item_id) continue;
        ++comparable;
        const double da = min_target_distance(*a->second->accepted_item_id, p);
        const double db = min_target_distance(*b->second->accepted_item_id, p);
        if (da < db)
            wins += 1.0;
        else if (da == db)
            wins += 0.5;
    }
    if (comparable == 0) return std::nullopt;
    return wins / comparable;
}

Report build_report(const std::vector<Transcript>& transcripts, const std::string& variant,
                    const std::string& config_hash, std::uint64_t seed, int max_turns,
                    const std::string& memory_mode, int memory_k) {
    Report r;
    r.agent_variant = variant;
    r.config_hash = config_hash;
    r.seed = seed;
    r.max_turns = max_turns;
    r.memory_mode = memory_mode;
    r.memory_k = memory_k;

    std::vector<Transcript> usable;
    for (const auto& t : transcripts) {
        if (t.outcome == Outcome::Errored)
            ++r.errored;
        else
            usable.push_back(t);
    }
    r.episodes = static_cast<int>(transcripts.size());
    if (!usable.empty()) {
        r.sr = compute_sr(usable);
        r.swr = compute_swr(usable);
    }

    auto trait_slice = [&](const std::string& name, auto&& predicate) {
        std::vector<Transcript> slice;
        for (const auto& t : usable)
            if (predicate(t)) slice.push_back(t);
        if (slice.empty()) return;
        r.per_trait[name] = {compute_sr(slice), compute_swr(slice)};
    };
    for (auto o : {profiles::Openness::Active, profiles::Openness::Neutral,
                   profiles::Openness::Passive})
        trait_slice(profiles::to_string(o),
                    [o](const Transcript& t) { return t.openness == o; });
    for (auto s : {profiles::DecisionStyle::Rational, profiles::DecisionStyle::Dependent,
                   profiles::DecisionStyle::Intuitive})
        trait_slice(profiles::to_string(s),
                    [s](const Transcript& t) { return t.decision_style == s; });

    r.actions_by_openness = action_distribution(usable);
    r.acceptance = strategy_acceptance(usable);
    return r;
}

namespace {

json report_to_json(const Report& r) {
    json per_trait = json::object();
    for (const auto& [trait, stats] : r.per_trait) {
        per_trait[trait] = {{"sr", stats.first},
                            {"swr", stats.second ? json(*stats.second) : json(nullptr)}};
    }
    json actions = json::object();
    for (const auto& [openness, dist] : r.actions_by_openness) {
        json row = json::object();
        for (const auto& [action, share] : dist) row[dialogue::action_label(action)] = share;
        actions[profiles::to_string(openness)] = row;
    }
    json acceptance = json::array();
    for (const auto& [key, cell] : r.acceptance) {
        acceptance.push_back({{"style", profiles::to_string(key.first)},
                              {"strategy", dialogue::strategy_label(key.second)},
                              {"attempts", cell.attempts},
                              {"accepted", cell.accepted},
                              {"rate", cell.rate()}});
    }
    return json{{"agent_variant", r.agent_variant},
                {"sr", r.sr},
                {"swr", r.swr ? json(*r.swr) : json(nullptr)},
                {"episodes", r.episodes},
                {"errored", r.errored},
                {"per_trait", per_trait},
                {"action_distribution", actions},
                {"strategy_acceptance", acceptance},
                {"config_hash", r.config_hash},
                {"seed", r.seed},
                {"max_turns", r.max_turns},
                {"memory_mode", r.memory_mode},
                {"memory_k", r.memory_k}};
}

std::string csv_number(std::optional<double> value) {
    if (!value) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *value);
    return buf;
}

}  // namespace

std::vector<std::string> write_report(const Report& report,
                                      const std::vector<Transcript>& transcripts,
                                      const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::vector<Transcript> ordered = transcripts;
    std::sort(ordered.begin(), ordered.end(),
              [](const Transcript& a, const Transcript& b) {
                  return a.episode_id < b.episode_id;
              });

    const std::string transcripts_path = (fs::path(out_dir) / "transcripts.jsonl").string();
    {
        std::ofstream f(transcripts_path);
        if (!f) throw IoError("cannot write " + transcripts_path);
        for (const auto& t : ordered) f << transcript_to_json(t).dump() << "\n";
    }

    const std::string report_path = (fs::path(out_dir) / "report.json").string();
    {
        std::ofstream f(report_path);
        if (!f) throw IoError("cannot write " + report_path);
        f << report_to_json(report).dump(2) << "\n";
    }

    const std::string csv_path = (fs::path(out_dir) / "report.csv").string();
    {
        std::ofstream f(csv_path);
        if (!f) throw IoError("cannot write " + csv_path);
        f << "variant,active_sr,active_swr,neutral_sr,neutral_swr,passive_sr,passive_swr,"
             "rational_sr,rational_swr,dependent_sr,dependent_swr,intuitive_sr,intuitive_swr,"
             "overall_sr,overall_swr\n";
        f << report.agent_variant;
        for (const char* trait :
             {"Active", "Neutral", "Passive", "Rational", "Dependent", "Intuitive"}) {
            auto it = report.per_trait.find(trait);
            if (it == report.per_trait.end()) {
                f << ",,";
            } else {
                f << "," << csv_number(it->second.first) << ","
                  << csv_number(it->second.second);
            }
        }
        f << "," << csv_number(report.episodes ? std::optional<double>(report.sr)
                                               : std::nullopt)
          << "," << csv_number(report.swr) << "\n";
    }
    return {transcripts_path, report_path, csv_path};
}

}  // namespace csales::eval
