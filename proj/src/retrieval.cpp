#include "csales/retrieval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

// keep httplib lean; the live embedder shares the same TU settings as gateway
#define CPPHTTPLIB_NO_EXCEPTIONS 1
#include <httplib.h>

namespace csales::retrieval {

using nlohmann::json;

double squared_distance(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim()) throw ConfigError("vector dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = static_cast<double>(a.values[i]) - static_cast<double>(b.values[i]);
        acc += d * d;
    }
    return acc;
}

HashEmbedder::HashEmbedder(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw ConfigError("embedding dim must be positive");
}

Vector HashEmbedder::embed(const std::string& text) const {
    if (trim(text).empty()) throw ConfigError("cannot embed empty text");
    Vector v;
    v.values.assign(dim_, 0.0f);
    for (const auto& tok : tokenize(text)) {
        const std::uint64_t h = fnv1a64(tok);
        const std::size_t slot = h % dim_;
        const float sign = ((h >> 32) & 1u) ? 1.0f : -1.0f;
        v.values[slot] += sign;
    }
    double norm = 0.0;
    for (float x : v.values) norm += static_cast<double>(x) * x;
    if (norm > 0.0) {
        const float inv = static_cast<float>(1.0 / std::sqrt(norm));
        for (float& x : v.values) x *= inv;
    }
    return v;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ConfigError("http embedder requires base_url");
}

Vector HttpEmbedder::embed(const std::string& text) const {
    if (trim(text).empty()) throw ConfigError("cannot embed empty text");
    json body = {{"model", config_.model}, {"input", text}};
    std::string last_error;
    for (int attempt = 0; attempt < 3; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(200 * (1 << attempt)));
        httplib::Client client(config_.base_url);
        client.set_read_timeout(30, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        auto res = client.Post(config_.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error";
            continue;
        }
        if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("data") || parsed["data"].empty()) {
            last_error = "unexpected embedding payload";
            continue;
        }
        Vector v;
        for (const auto& x : parsed["data"][0]["embedding"])
            v.values.push_back(x.get<float>());
        if (config_.dim != 0 && v.dim() != config_.dim) {
            last_error = "provider returned dim " + std::to_string(v.dim());
            continue;
        }
        return v;
    }
    throw GatewayError("embedding provider failed after 3 attempts: " + last_error);
}

std::unique_ptr<Embedder> make_embedder(const std::string& provider, std::size_t dim,
                                        const HttpEmbedderConfig& http) {
    if (provider == "hash") return std::make_unique<HashEmbedder>(dim);
    if (provider == "http") {
        HttpEmbedderConfig cfg = http;
        cfg.dim = dim;
        return std::make_unique<HttpEmbedder>(cfg);
    }
    throw ConfigError("unknown embedding provider: " + provider);
}

std::string embed_item_text(const catalog::Item& item) {
    std::string path;
    for (std::size_t i = 0; i < item.category_path.size(); ++i) {
        if (i) path += ">";
        path += item.category_path[i];
    }
    return item.title + " | " + path + " | " + item.description;
}

VectorIndex VectorIndex::build(const catalog::Catalog& cat, const Embedder& embedder) {
    std::vector<std::pair<std::string, Vector>> entries;
    entries.reserve(cat.items().size());
    for (const auto& item : cat.items())
        entries.emplace_back(item.id, embedder.embed(embed_item_text(item)));
    return from_entries(std::move(entries));
}

VectorIndex VectorIndex::from_entries(std::vector<std::pair<std::string, Vector>> entries) {
    VectorIndex idx;
    idx.entries_ = std::move(entries);
    for (std::size_t i = 0; i < idx.entries_.size(); ++i) {
        const auto& [id, vec] = idx.entries_[i];
        if (idx.by_id_.count(id)) throw ConfigError("duplicate id in index: " + id);
        if (i == 0)
            idx.dim_ = vec.dim();
        else if (vec.dim() != idx.dim_)
            throw ConfigError("inconsistent vector dim in index");
        idx.by_id_[id] = i;
    }
    return idx;
}

bool VectorIndex::contains(const std::string& item_id) const {
    return by_id_.count(item_id) > 0;
}

const Vector& VectorIndex::vector_of(const std::string& item_id) const {
    auto it = by_id_.find(item_id);
    if (it == by_id_.end()) throw NotFoundError("id not in index: " + item_id);
    return entries_[it->second].second;
}

void VectorIndex::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write index: " + path);
    json header = {{"format", "csales-index"}, {"version", 1}, {"dim", dim_},
                   {"entries", entries_.size()}};
    f << header.dump() << "\n";
    for (const auto& [id, vec] : entries_) {
        json row = {{"id", id}, {"v", vec.values}};
        f << row.dump() << "\n";
    }
}

VectorIndex VectorIndex::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open index: " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty index file: " + path);
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != "csales-index")
        throw IoError("not an index snapshot: " + path);
    if (header.value("version", 0) != 1)
        throw IoError("unsupported index version in " + path);
    std::vector<std::pair<std::string, Vector>> entries;
    while (std::getline(f, line)) {
        if (trim(line).empty()) continue;
        json row = json::parse(line);
        Vector v;
        v.values = row.at("v").get<std::vector<float>>();
        entries.emplace_back(row.at("id").get<std::string>(), std::move(v));
    }
    return from_entries(std::move(entries));
}

RetrievalResult nearest(const VectorIndex& index, const Vector& query, std::size_t k,
                        const std::string* exclude_id) {
    std::vector<std::pair<double, const std::string*>> scored;
    scored.reserve(index.size());
    for (const auto& [id, vec] : index.entries()) {
        if (exclude_id && id == *exclude_id) continue;
        scored.emplace_back(squared_distance(query, vec), &id);
    }
    const std::size_t take = std::min(k, scored.size());
    auto cmp = [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return *a.second < *b.second;  // tie: ascending item id
    };
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), cmp);
    RetrievalResult out;
    out.hits.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
        out.hits.push_back({*scored[i].second, -scored[i].first});
    return out;
}

RetrievalResult query_search(const VectorIndex& index, const Embedder& embedder,
                             const std::string& query_text, std::size_t k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (index.size() == 0) throw NotFoundError("query_search over empty index");
    return nearest(index, embedder.embed(query_text), k);
}

RetrievalResult item_search(const VectorIndex& index, const std::string& ref_item_id,
                            std::size_t k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    const Vector& ref = index.vector_of(ref_item_id);  // throws NotFound on unknown id
    return nearest(index, ref, k, &ref_item_id);
}

BudgetPartition partition_by_budget(const RetrievalResult& results,
                                    const catalog::Catalog& cat, double budget_min,
                                    double budget_max) {
    if (budget_min > budget_max) throw ConfigError("budget min exceeds max");
    BudgetPartition out;
    for (const auto& hit : results.hits) {
        const auto& item = cat.require(hit.item_id);
        if (item.price <= budget_max)
            out.in_budget.push_back(hit);
        else
            out.out_of_budget.push_back(hit);
    }
    return out;
}

}  // namespace csales::retrieval
