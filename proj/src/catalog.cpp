#include "csales/catalog.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace csales::catalog {

using nlohmann::json;

namespace {

constexpr int kSnapshotVersion = 1;

std::optional<json> parse_line(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
}

std::optional<Item> item_from_meta(const json& j, const FieldMap& f) {
    Item it;
    if (!j.contains(f.meta_id) || !j[f.meta_id].is_string()) return std::nullopt;
    it.id = j[f.meta_id].get<std::string>();
    if (it.id.empty()) return std::nullopt;
    if (j.contains(f.meta_title) && j[f.meta_title].is_string())
        it.title = j[f.meta_title].get<std::string>();
    if (j.contains(f.meta_description)) {
        const json& d = j[f.meta_description];
        if (d.is_string()) {
            it.description = d.get<std::string>();
        } else if (d.is_array()) {
            // some corpora ship descriptions as paragraph arrays
            std::string joined;
            for (const auto& part : d)
                if (part.is_string()) {
                    if (!joined.empty()) joined += " ";
                    joined += part.get<std::string>();
                }
            it.description = joined;
        }
    }
    if (j.contains(f.meta_features) && j[f.meta_features].is_array())
        for (const auto& feat : j[f.meta_features])
            if (feat.is_string()) it.features.push_back(feat.get<std::string>());
    if (j.contains(f.meta_price) && j[f.meta_price].is_number())
        it.price = j[f.meta_price].get<double>();
    if (j.contains(f.meta_categories) && j[f.meta_categories].is_array())
        for (const auto& c : j[f.meta_categories])
            if (c.is_string()) it.category_path.push_back(c.get<std::string>());
    if (j.contains(f.meta_avg_rating) && j[f.meta_avg_rating].is_number())
        it.avg_rating = j[f.meta_avg_rating].get<double>();
    if (j.contains(f.meta_rating_count) && j[f.meta_rating_count].is_number())
        it.rating_count = j[f.meta_rating_count].get<std::int64_t>();

    // completeness gate: missing critical metadata drops the item
    if (it.title.empty() || it.description.empty() || it.category_path.empty() ||
        it.price <= 0.0) {
        return std::nullopt;
    }
    return it;
}

std::optional<Interaction> interaction_from_review(const json& j, const FieldMap& f) {
    Interaction in;
    if (!j.contains(f.review_user_id) || !j[f.review_user_id].is_string()) return std::nullopt;
    if (!j.contains(f.review_item_id) || !j[f.review_item_id].is_string()) return std::nullopt;
    in.user_id = j[f.review_user_id].get<std::string>();
    in.item_id = j[f.review_item_id].get<std::string>();
    if (in.user_id.empty() || in.item_id.empty()) return std::nullopt;
    if (j.contains(f.review_rating) && j[f.review_rating].is_number())
        in.rating = static_cast<int>(j[f.review_rating].get<double>());
    if (j.contains(f.review_title) && j[f.review_title].is_string())
        in.review_title = j[f.review_title].get<std::string>();
    if (j.contains(f.review_text) && j[f.review_text].is_string())
        in.review_body = j[f.review_text].get<std::string>();
    if (j.contains(f.review_timestamp) && j[f.review_timestamp].is_number())
        in.timestamp = j[f.review_timestamp].get<std::int64_t>();
    return in;
}

void check_malformed_budget(const std::string& path, std::size_t total,
                            const std::vector<std::size_t>& bad_lines) {
    if (total == 0) return;
    if (bad_lines.size() * 10 > total) {
        std::ostringstream msg;
        msg << path << ": " << bad_lines.size() << "/" << total
            << " malformed lines (>10%), first bad lines:";
        std::size_t shown = 0;
        for (std::size_t n : bad_lines) {
            msg << " " << n;
            if (++shown >= 20) break;
        }
        throw IoError(msg.str());
    }
}

}  // namespace

IngestResult ingest(const std::string& reviews_path, const std::string& metadata_path,
                    const FieldMap& fields) {
    std::ifstream meta(metadata_path);
    if (!meta) throw IoError("cannot open metadata file: " + metadata_path);
    std::ifstream reviews(reviews_path);
    if (!reviews) throw IoError("cannot open reviews file: " + reviews_path);

    IngestResult out;
    std::unordered_map<std::string, bool> item_ok;  // id -> kept?
    std::set<std::string> seen_ids;

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::size_t> meta_bad;
    while (std::getline(meta, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto j = parse_line(line);
        if (!j) {
            meta_bad.push_back(line_no);
            out.stats.malformed_lines++;
            out.stats.malformed_line_numbers.push_back(line_no);
            continue;
        }
        out.stats.items_parsed++;
        auto item = item_from_meta(*j, fields);
        if (!item) {
            out.stats.items_dropped_incomplete++;
            // record the id when present so its interactions drop too
            if (j->contains(fields.meta_id) && (*j)[fields.meta_id].is_string())
                item_ok[(*j)[fields.meta_id].get<std::string>()] = false;
            continue;
        }
        if (seen_ids.count(item->id)) continue;  // first record wins
        seen_ids.insert(item->id);
        item_ok[item->id] = true;
        out.items.push_back(std::move(*item));
    }
    check_malformed_budget(metadata_path, line_no, meta_bad);

    line_no = 0;
    std::vector<std::size_t> review_bad;
    while (std::getline(reviews, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto j = parse_line(line);
        if (!j) {
            review_bad.push_back(line_no);
            out.stats.malformed_lines++;
            out.stats.malformed_line_numbers.push_back(line_no);
            continue;
        }
        out.stats.interactions_parsed++;
        auto in = interaction_from_review(*j, fields);
        if (!in) {
            out.stats.interactions_dropped++;
            continue;
        }
        auto ok = item_ok.find(in->item_id);
        if (ok == item_ok.end() || !ok->second) {
            out.stats.interactions_dropped++;
            continue;
        }
        out.interactions.push_back(std::move(*in));
    }
    check_malformed_budget(reviews_path, line_no, review_bad);
    return out;
}

std::vector<Interaction> k_core_filter(const std::vector<Interaction>& interactions, int k) {
    if (k < 1) throw ConfigError("k_core_filter requires k >= 1");

    std::unordered_map<std::string, int> user_deg;
    std::unordered_map<std::string, int> item_deg;
    for (const auto& in : interactions) {
        user_deg[in.user_id]++;
        item_deg[in.item_id]++;
    }

    // peel until fixpoint
    bool changed = true;
    std::vector<char> alive(interactions.size(), 1);
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < interactions.size(); ++i) {
            if (!alive[i]) continue;
            const auto& in = interactions[i];
            if (user_deg[in.user_id] < k || item_deg[in.item_id] < k) {
                alive[i] = 0;
                user_deg[in.user_id]--;
                item_deg[in.item_id]--;
                changed = true;
            }
        }
    }

    std::vector<Interaction> out;
    for (std::size_t i = 0; i < interactions.size(); ++i)
        if (alive[i]) out.push_back(interactions[i]);
    return out;
}

CategoryTree CategoryTree::build(const std::vector<Item>& items) {
    CategoryTree tree;
    for (const auto& item : items) {
        Node* node = &tree.root_;
        for (const auto& seg : item.category_path) node = &node->children[seg];
        node->item_ids.push_back(item.id);
        tree.max_depth_ = std::max(tree.max_depth_, item.category_path.size());
    }
    return tree;
}

const CategoryTree::Node* CategoryTree::find(const std::vector<std::string>& path) const {
    const Node* node = &root_;
    for (const auto& seg : path) {
        auto it = node->children.find(seg);
        if (it == node->children.end())
            throw NotFoundError("category segment not found: " + seg);
        node = &it->second;
    }
    return node;
}

bool CategoryTree::valid_prefix(const std::vector<std::string>& path) const {
    const Node* node = &root_;
    for (const auto& seg : path) {
        auto it = node->children.find(seg);
        if (it == node->children.end()) return false;
        node = &it->second;
    }
    return true;
}

std::vector<std::string> CategoryTree::children(const std::vector<std::string>& path) const {
    const Node* node = find(path);
    std::vector<std::string> out;
    out.reserve(node->children.size());
    for (const auto& [name, _] : node->children) out.push_back(name);
    return out;
}

void CategoryTree::collect(const Node& node, std::vector<std::string>& out) {
    out.insert(out.end(), node.item_ids.begin(), node.item_ids.end());
    for (const auto& [_, child] : node.children) collect(child, out);
}

std::vector<std::string> CategoryTree::items_under(const std::vector<std::string>& path) const {
    const Node* node = find(path);
    std::vector<std::string> out;
    collect(*node, out);
    std::sort(out.begin(), out.end());
    return out;
}

Catalog::Catalog(std::vector<Item> items, std::vector<Interaction> interactions)
    : items_(std::move(items)), interactions_(std::move(interactions)) {
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (by_id_.count(items_[i].id))
            throw ConfigError("duplicate item id in catalog: " + items_[i].id);
        by_id_[items_[i].id] = i;
    }
    tree_ = CategoryTree::build(items_);
}

const Item* Catalog::find(const std::string& item_id) const {
    auto it = by_id_.find(item_id);
    return it == by_id_.end() ? nullptr : &items_[it->second];
}

const Item& Catalog::require(const std::string& item_id) const {
    const Item* item = find(item_id);
    if (!item) throw NotFoundError("unknown item id: " + item_id);
    return *item;
}

std::optional<UserHistory> Catalog::split_history_target(const std::string& user_id,
                                                         std::string* reason) const {
    std::vector<Interaction> mine;
    for (const auto& in : interactions_)
        if (in.user_id == user_id) mine.push_back(in);
    if (mine.size() < 2) {
        if (reason) *reason = "too_few_interactions";
        return std::nullopt;
    }
    std::sort(mine.begin(), mine.end(), [](const Interaction& a, const Interaction& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.item_id < b.item_id;  // deterministic tie-break
    });

    std::vector<std::pair<Interaction, const Item*>> resolved;
    for (auto& in : mine) {
        const Item* item = find(in.item_id);
        if (!item) continue;
        resolved.emplace_back(std::move(in), item);
    }
    if (resolved.size() < 2) {
        if (reason) *reason = "too_few_interactions";
        return std::nullopt;
    }

    const auto& target_path = resolved.back().second->category_path;
    bool all_same = std::all_of(resolved.begin(), resolved.end(), [&](const auto& p) {
        return p.second->category_path == target_path;
    });
    if (all_same) {
        if (reason) *reason = "single_category_path";
        return std::nullopt;
    }

    UserHistory h;
    h.user_id = user_id;
    h.target_category_path = target_path;
    for (auto& p : resolved) {
        if (p.second->category_path == target_path)
            h.target_items.push_back(std::move(p));
        else
            h.history_items.push_back(std::move(p));
    }
    return h;
}

Catalog::SplitOutcome Catalog::split_all_users() const {
    std::vector<std::string> user_ids;
    {
        std::set<std::string> seen;
        for (const auto& in : interactions_)
            if (seen.insert(in.user_id).second) user_ids.push_back(in.user_id);
    }
    std::sort(user_ids.begin(), user_ids.end());

    SplitOutcome out;
    for (const auto& uid : user_ids) {
        std::string reason;
        auto h = split_history_target(uid, &reason);
        if (h)
            out.histories.push_back(std::move(*h));
        else
            out.skipped[uid] = reason;
    }
    return out;
}

void Catalog::save_snapshot(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write snapshot: " + path);
    json header = {{"format", "csales-catalog"},
                   {"version", kSnapshotVersion},
                   {"items", items_.size()},
                   {"interactions", interactions_.size()}};
    f << header.dump() << "\n";
    for (const auto& it : items_) {
        json reviews = json::array();
        for (const auto& r : it.reviews)
            reviews.push_back({{"rating", r.rating}, {"title", r.title}, {"body", r.body}});
        json j = {{"type", "item"},
                  {"id", it.id},
                  {"title", it.title},
                  {"description", it.description},
                  {"features", it.features},
                  {"price", it.price},
                  {"category_path", it.category_path},
                  {"avg_rating", it.avg_rating},
                  {"rating_count", it.rating_count},
                  {"reviews", reviews}};
        f << j.dump() << "\n";
    }
    for (const auto& in : interactions_) {
        json j = {{"type", "interaction"}, {"user_id", in.user_id},
                  {"item_id", in.item_id}, {"rating", in.rating},
                  {"review_title", in.review_title}, {"review_body", in.review_body},
                  {"timestamp", in.timestamp}};
        f << j.dump() << "\n";
    }
    if (!f) throw IoError("write failed: " + path);
}

Catalog Catalog::load_snapshot(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open snapshot: " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty snapshot: " + path);
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != "csales-catalog")
        throw IoError("not a catalog snapshot: " + path);
    if (header.value("version", 0) != kSnapshotVersion)
        throw IoError("unsupported catalog snapshot version in " + path);

    std::vector<Item> items;
    std::vector<Interaction> interactions;
    while (std::getline(f, line)) {
        if (trim(line).empty()) continue;
        json j = json::parse(line);
        const std::string type = j.value("type", "");
        if (type == "item") {
            Item it;
            it.id = j.at("id").get<std::string>();
            it.title = j.at("title").get<std::string>();
            it.description = j.at("description").get<std::string>();
            it.features = j.value("features", std::vector<std::string>{});
            it.price = j.at("price").get<double>();
            it.category_path = j.at("category_path").get<std::vector<std::string>>();
            it.avg_rating = j.value("avg_rating", 0.0);
            it.rating_count = j.value("rating_count", std::int64_t{0});
            for (const auto& r : j.value("reviews", json::array()))
                it.reviews.push_back({r.value("rating", 0), r.value("title", ""),
                                      r.value("body", "")});
            items.push_back(std::move(it));
        } else if (type == "interaction") {
            Interaction in;
            in.user_id = j.at("user_id").get<std::string>();
            in.item_id = j.at("item_id").get<std::string>();
            in.rating = j.value("rating", 0);
            in.review_title = j.value("review_title", "");
            in.review_body = j.value("review_body", "");
            in.timestamp = j.value("timestamp", std::int64_t{0});
            interactions.push_back(std::move(in));
        } else {
            throw IoError("unknown snapshot record type: " + type);
        }
    }
    return Catalog(std::move(items), std::move(interactions));
}

}  // namespace csales::catalog
