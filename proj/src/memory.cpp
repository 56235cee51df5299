#include "csales/memory.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace csales::memory {

using nlohmann::json;

MemoryStore::MemoryStore(const retrieval::Embedder& embedder, ValueMode mode)
    : embedder_(embedder), mode_(mode), entries_(std::make_shared<Snapshot>()) {}

std::shared_ptr<const MemoryStore::Snapshot> MemoryStore::snapshot() const {
    std::lock_guard<std::mutex> lock(write_mutex_);
    return entries_;
}

std::optional<std::size_t> MemoryStore::insert(const std::string& profile_text,
                                               dialogue::Strategy strategy,
                                               std::optional<std::string> utterance,
                                               const std::string& episode_id) {
    MemoryEntry entry;
    try {
        entry.key_vector = embedder_.embed(profile_text);
    } catch (const Error& e) {
        std::cerr << "[memory] insert skipped, embedding failed: " << e.what() << "\n";
        return std::nullopt;
    }
    entry.profile_text = profile_text;
    entry.strategy = strategy;
    if (mode_ == ValueMode::FullUtterance) entry.utterance = std::move(utterance);
    entry.source_episode_id = episode_id;

    std::lock_guard<std::mutex> lock(write_mutex_);
    auto next = std::make_shared<Snapshot>(*entries_);
    next->push_back(std::move(entry));
    entries_ = std::move(next);
    return entries_->size() - 1;
}

std::vector<MemoryEntry> MemoryStore::retrieve(const std::string& profile_text,
                                               std::size_t k) const {
    if (k < 1) throw ConfigError("memory retrieve needs k >= 1");
    auto snap = snapshot();
    if (snap->empty()) return {};
    const retrieval::Vector query = embedder_.embed(profile_text);

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(snap->size());
    for (std::size_t i = 0; i < snap->size(); ++i)
        scored.emplace_back(retrieval::squared_distance(query, (*snap)[i].key_vector), i);
    const std::size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end());  // pair ordering: distance, then insertion index
    std::vector<MemoryEntry> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back((*snap)[scored[i].second]);
    return out;
}

std::size_t MemoryStore::preload(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open memory file: " + path);
    auto loaded = std::make_shared<Snapshot>();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("profile_text") || !j.contains("strategy"))
            throw IoError("memory schema mismatch at line " + std::to_string(line_no) + " in " +
                          path);
        MemoryEntry entry;
        entry.profile_text = j.at("profile_text").get<std::string>();
        auto strategy = dialogue::parse_strategy(j.at("strategy").get<std::string>());
        if (!strategy)
            throw IoError("unknown strategy in memory file at line " + std::to_string(line_no));
        entry.strategy = *strategy;
        if (mode_ == ValueMode::FullUtterance && j.contains("utterance") &&
            j["utterance"].is_string())
            entry.utterance = j["utterance"].get<std::string>();
        entry.source_episode_id = j.value("episode_id", "");
        entry.key_vector = embedder_.embed(entry.profile_text);  // provider-independent file
        loaded->push_back(std::move(entry));
    }
    std::lock_guard<std::mutex> lock(write_mutex_);
    entries_ = std::move(loaded);
    return entries_->size();
}

void MemoryStore::save(const std::string& path) const {
    auto snap = snapshot();
    std::ofstream f(path);
    if (!f) throw IoError("cannot write memory file: " + path);
    for (const auto& entry : *snap) {
        json j = {{"profile_text", entry.profile_text},
                  {"strategy", dialogue::strategy_label(entry.strategy)},
                  {"episode_id", entry.source_episode_id}};
        if (entry.utterance) j["utterance"] = *entry.utterance;
        f << j.dump() << "\n";
    }
}

std::size_t MemoryStore::size() const { return snapshot()->size(); }

}  // namespace csales::memory
