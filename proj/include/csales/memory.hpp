#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "csales/dialogue.hpp"
#include "csales/retrieval.hpp"

namespace csales::memory {

enum class ValueMode { StrategyOnly, FullUtterance };

struct MemoryEntry {
    retrieval::Vector key_vector;  // embedding of profile_text
    std::string profile_text;
    dialogue::Strategy strategy;
    std::optional<std::string> utterance;  // present only in full-utterance stores
    std::string source_episode_id;
};

// Profile-keyed store of successful out-of-budget persuasions. Reads walk an
// immutable snapshot; inserts publish a new snapshot under a writer lock, so
// concurrent episodes never see a half-written store.
class MemoryStore {
public:
    MemoryStore(const retrieval::Embedder& embedder, ValueMode mode);

    // caller guarantees the episode closed with an out-of-budget acceptance;
    // embedding failures make the insert a no-op
    std::optional<std::size_t> insert(const std::string& profile_text,
                                      dialogue::Strategy strategy,
                                      std::optional<std::string> utterance,
                                      const std::string& episode_id);

    // k nearest by squared L2 over profile embeddings; ties by insertion order
    std::vector<MemoryEntry> retrieve(const std::string& profile_text, std::size_t k) const;

    // loads the line-delimited format, re-embedding keys with the current
    // provider; returns the entry count
    std::size_t preload(const std::string& path);
    void save(const std::string& path) const;

    std::size_t size() const;
    ValueMode mode() const { return mode_; }

private:
    using Snapshot = std::vector<MemoryEntry>;
    std::shared_ptr<const Snapshot> snapshot() const;

    const retrieval::Embedder& embedder_;
    ValueMode mode_;
    mutable std::mutex write_mutex_;
    std::shared_ptr<const Snapshot> entries_;
};

}  // namespace csales::memory
