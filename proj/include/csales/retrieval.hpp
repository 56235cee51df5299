#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "csales/catalog.hpp"
#include "csales/common.hpp"

namespace csales::retrieval {

struct Vector {
    std::vector<float> values;
    std::size_t dim() const { return values.size(); }
};

double squared_distance(const Vector& a, const Vector& b);

// Text -> dense vector. Implementations must be deterministic for a fixed
// configuration; the hash provider is fully offline.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual Vector embed(const std::string& text) const = 0;
    virtual std::size_t dim() const = 0;
    virtual std::string name() const = 0;
};

// Signed token-hash bag-of-words, L2-normalized. Offline stand-in for a
// sentence encoder: identical texts map to identical vectors and token
// overlap drives proximity.
class HashEmbedder : public Embedder {
public:
    explicit HashEmbedder(std::size_t dim = 256);
    Vector embed(const std::string& text) const override;
    std::size_t dim() const override { return dim_; }
    std::string name() const override { return "hash"; }

private:
    std::size_t dim_;
};

struct HttpEmbedderConfig {
    std::string base_url;
    std::string path = "/v1/embeddings";
    std::string model;
    std::string api_key;
    std::size_t dim = 0;  // 0 = accept whatever the provider returns
};

// Calls a JSON embeddings endpoint; retries transient failures 3 times.
class HttpEmbedder : public Embedder {
public:
    explicit HttpEmbedder(HttpEmbedderConfig config);
    Vector embed(const std::string& text) const override;
    std::size_t dim() const override { return config_.dim; }
    std::string name() const override { return "http"; }

private:
    HttpEmbedderConfig config_;
};

std::unique_ptr<Embedder> make_embedder(const std::string& provider, std::size_t dim,
                                        const HttpEmbedderConfig& http = {});

// Canonical text an item is indexed by: "title | path>joined | description".
std::string embed_item_text(const catalog::Item& item);

struct ScoredItem {
    std::string item_id;
    double score;  // negative squared distance; higher is closer
};

struct RetrievalResult {
    std::vector<ScoredItem> hits;
};

// Exact brute-force index. Build once, then read-only.
class VectorIndex {
public:
    VectorIndex() = default;

    static VectorIndex build(const catalog::Catalog& cat, const Embedder& embedder);
    static VectorIndex from_entries(std::vector<std::pair<std::string, Vector>> entries);

    std::size_t size() const { return entries_.size(); }
    std::size_t dim() const { return dim_; }
    bool contains(const std::string& item_id) const;
    const Vector& vector_of(const std::string& item_id) const;
    const std::vector<std::pair<std::string, Vector>>& entries() const { return entries_; }

    void save(const std::string& path) const;
    static VectorIndex load(const std::string& path);

private:
    std::vector<std::pair<std::string, Vector>> entries_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::size_t dim_ = 0;
};

// Top-k by ascending squared distance to embed(query_text); ties broken by
// ascending item id. Throws on an empty index.
RetrievalResult query_search(const VectorIndex& index, const Embedder& embedder,
                             const std::string& query_text, std::size_t k);

// Same ranking around a stored vector, excluding the reference itself.
RetrievalResult item_search(const VectorIndex& index, const std::string& ref_item_id,
                            std::size_t k);

// Lower-level: rank the provided vector against all entries (optionally
// excluding one id). Shared by both searches and by memory retrieval.
RetrievalResult nearest(const VectorIndex& index, const Vector& query, std::size_t k,
                        const std::string* exclude_id = nullptr);

struct BudgetPartition {
    std::vector<ScoredItem> in_budget;       // price <= max
    std::vector<ScoredItem> out_of_budget;   // price > max
};

// Splits results by the budget ceiling, preserving input order. Every result
// id must resolve to a price.
BudgetPartition partition_by_budget(const RetrievalResult& results,
                                    const catalog::Catalog& cat, double budget_min,
                                    double budget_max);

}  // namespace csales::retrieval
