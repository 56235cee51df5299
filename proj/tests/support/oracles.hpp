#pragma once

// Independent reference implementations used to check the library. These
// deliberately take different routes (full stable sorts, recounted degrees,
// long-double accumulation) so a shared bug cannot hide.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "csales/catalog.hpp"
#include "csales/retrieval.hpp"

namespace oracle {

inline double slow_squared_distance(const std::vector<float>& a, const std::vector<float>& b) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const long double d = static_cast<long double>(a[i]) - static_cast<long double>(b[i]);
        acc += d * d;
    }
    return static_cast<double>(acc);
}

struct RankedId {
    std::string id;
    double distance;
};

// exhaustive scan + full stable sort, ties by ascending id
inline std::vector<RankedId> knn(
    const std::vector<std::pair<std::string, csales::retrieval::Vector>>& entries,
    const csales::retrieval::Vector& query, std::size_t k,
    const std::string* exclude = nullptr) {
    std::vector<RankedId> all;
    for (const auto& [id, vec] : entries) {
        if (exclude && id == *exclude) continue;
        all.push_back({id, slow_squared_distance(query.values, vec.values)});
    }
    std::stable_sort(all.begin(), all.end(), [](const RankedId& a, const RankedId& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.id < b.id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

// peel by full recount every round until nothing changes
inline std::vector<csales::catalog::Interaction> k_core(
    std::vector<csales::catalog::Interaction> edges, int k) {
    for (;;) {
        std::map<std::string, int> users;
        std::map<std::string, int> items;
        for (const auto& e : edges) {
            users[e.user_id]++;
            items[e.item_id]++;
        }
        std::vector<csales::catalog::Interaction> surviving;
        for (const auto& e : edges)
            if (users[e.user_id] >= k && items[e.item_id] >= k) surviving.push_back(e);
        if (surviving.size() == edges.size()) return edges;
        edges = std::move(surviving);
    }
}

inline std::set<std::pair<std::string, std::string>> edge_set(
    const std::vector<csales::catalog::Interaction>& edges) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& e : edges) out.insert({e.user_id, e.item_id});
    return out;
}

}  // namespace oracle
