#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "csales/common.hpp"

namespace csales::catalog {

struct Review {
    int rating = 0;  // 1..5
    std::string title;
    std::string body;
};

struct Item {
    std::string id;
    std::string title;
    std::string description;
    std::vector<std::string> features;
    double price = 0.0;
    std::vector<std::string> category_path;  // root first
    double avg_rating = 0.0;
    std::int64_t rating_count = 0;
    std::vector<Review> reviews;
};

struct Interaction {
    std::string user_id;
    std::string item_id;
    int rating = 0;
    std::string review_title;
    std::string review_body;
    std::int64_t timestamp = 0;
};

struct UserHistory {
    std::string user_id;
    // chronological, oldest first
    std::vector<std::pair<Interaction, const Item*>> history_items;
    std::vector<std::pair<Interaction, const Item*>> target_items;
    std::vector<std::string> target_category_path;
};

// Optional remapping of raw corpus field names; unset entries use defaults.
struct FieldMap {
    std::string review_user_id = "user_id";
    std::string review_item_id = "parent_asin";
    std::string review_rating = "rating";
    std::string review_title = "title";
    std::string review_text = "text";
    std::string review_timestamp = "timestamp";
    std::string meta_id = "id";
    std::string meta_title = "title";
    std::string meta_description = "description";
    std::string meta_features = "features";
    std::string meta_price = "price";
    std::string meta_categories = "categories";
    std::string meta_avg_rating = "average_rating";
    std::string meta_rating_count = "rating_number";
};

struct IngestStats {
    std::size_t items_parsed = 0;
    std::size_t items_dropped_incomplete = 0;
    std::size_t interactions_parsed = 0;
    std::size_t interactions_dropped = 0;
    std::size_t malformed_lines = 0;
    std::vector<std::size_t> malformed_line_numbers;
};

struct IngestResult {
    std::vector<Interaction> interactions;
    std::vector<Item> items;
    IngestStats stats;
};

// Parses line-delimited review + metadata files. Items missing critical
// metadata (title, description, category, price > 0) are dropped together
// with their interactions. More than 10% malformed lines in either file is
// fatal.
IngestResult ingest(const std::string& reviews_path, const std::string& metadata_path,
                    const FieldMap& fields = {});

// Iterative peeling to the maximal subgraph where every user and every item
// has at least k interactions. Output preserves input order of survivors.
std::vector<Interaction> k_core_filter(const std::vector<Interaction>& interactions, int k);

// Hierarchical category tree over the catalog. Children are name-sorted;
// items attach at the node of their exact path.
class CategoryTree {
public:
    static CategoryTree build(const std::vector<Item>& items);

    // direct child names under `path` (empty = root), name-sorted
    std::vector<std::string> children(const std::vector<std::string>& path) const;

    // ids of all items whose category_path has `path` as prefix, id-sorted
    std::vector<std::string> items_under(const std::vector<std::string>& path) const;

    bool valid_prefix(const std::vector<std::string>& path) const;
    std::size_t max_depth() const { return max_depth_; }

private:
    struct Node {
        std::map<std::string, Node> children;  // ordered => name-sorted iteration
        std::vector<std::string> item_ids;
    };
    const Node* find(const std::vector<std::string>& path) const;
    static void collect(const Node& node, std::vector<std::string>& out);

    Node root_;
    std::size_t max_depth_ = 0;
};

// Immutable item database + category tree, shared read-only by episode
// workers once constructed.
class Catalog {
public:
    Catalog(std::vector<Item> items, std::vector<Interaction> interactions);

    const std::vector<Item>& items() const { return items_; }
    const std::vector<Interaction>& interactions() const { return interactions_; }
    const CategoryTree& tree() const { return tree_; }

    const Item* find(const std::string& item_id) const;
    const Item& require(const std::string& item_id) const;

    // Per-user chronological split: the most recent interaction's exact
    // category path defines the targets; everything else is history. Users
    // whose items all share one path (or with < 2 interactions) are skipped.
    struct SplitOutcome {
        std::vector<UserHistory> histories;
        std::map<std::string, std::string> skipped;  // user_id -> reason code
    };
    SplitOutcome split_all_users() const;
    // Single-user variant; nullopt with `reason` set when the user is skipped.
    std::optional<UserHistory> split_history_target(const std::string& user_id,
                                                    std::string* reason = nullptr) const;

    void save_snapshot(const std::string& path) const;
    static Catalog load_snapshot(const std::string& path);

private:
    std::vector<Item> items_;
    std::vector<Interaction> interactions_;
    std::unordered_map<std::string, std::size_t> by_id_;
    CategoryTree tree_;
};

}  // namespace csales::catalog
