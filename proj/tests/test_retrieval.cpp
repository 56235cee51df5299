#include <doctest.h>

#include <random>

#include "csales/retrieval.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace csales;
using retrieval::HashEmbedder;
using retrieval::Vector;
using retrieval::VectorIndex;

namespace {

catalog::Item shirt() {
    catalog::Item it;
    it.id = "S1";
    it.title = "Shirt";
    it.description = "soft cotton";
    it.price = 19.0;
    it.category_path = {"Clothing", "Tops"};
    return it;
}

Vector random_vector(std::mt19937& rng, std::size_t dim) {
    Vector v;
    v.values.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i)
        v.values.push_back(static_cast<float>(static_cast<int>(rng() % 2000) - 1000) / 250.0f);
    return v;
}

catalog::Catalog priced_catalog(const std::vector<std::pair<std::string, double>>& priced) {
    std::vector<catalog::Item> items;
    for (const auto& [id, price] : priced) {
        catalog::Item it;
        it.id = id;
        it.title = "T" + id;
        it.description = "d" + id;
        it.price = price;
        it.category_path = {"C"};
        items.push_back(std::move(it));
    }
    return catalog::Catalog(std::move(items), {});
}

}  // namespace

TEST_SUITE("retrieval") {

TEST_CASE("embed_item_text uses the pipe-delimited layout") {
    CHECK(retrieval::embed_item_text(shirt()) == "Shirt | Clothing>Tops | soft cotton");

    auto with_features = shirt();
    with_features.features = {"breathable", "machine washable"};
    CHECK(retrieval::embed_item_text(with_features) == "Shirt | Clothing>Tops | soft cotton");

    auto unicode = shirt();
    unicode.title = "Chemise décontractée";
    CHECK(retrieval::embed_item_text(unicode) ==
          "Chemise décontractée | Clothing>Tops | soft cotton");
}

TEST_CASE("hash embedding is deterministic and unit-length") {
    HashEmbedder embedder(256);
    auto a = embedder.embed("aaa bbb ccc");
    auto b = embedder.embed("aaa bbb ccc");
    CHECK(a.values == b.values);
    CHECK(retrieval::squared_distance(a, b) == 0.0);
    double norm = 0.0;
    for (float x : a.values) norm += static_cast<double>(x) * x;
    CHECK(norm == doctest::Approx(1.0));
    CHECK_THROWS_AS(static_cast<void>(embedder.embed("   ")), ConfigError);
}

TEST_CASE("every corpus text is its own nearest neighbor") {
    HashEmbedder embedder(256);
    const std::vector<std::string> corpus = {
        "soft merino base layer",      "waterproof hiking shell",
        "noise cancelling headphones", "mechanical keyboard with brown switches",
        "ceramic pour over kettle",    "trail running shoes with wide toe box"};
    std::vector<std::pair<std::string, Vector>> entries;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        entries.emplace_back("id" + std::to_string(i), embedder.embed(corpus[i]));
    auto index = VectorIndex::from_entries(entries);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto hits = retrieval::query_search(index, embedder, corpus[i], 1);
        REQUIRE(hits.hits.size() == 1);
        CHECK(hits.hits[0].item_id == "id" + std::to_string(i));
        // and the oracle agrees end to end
        auto expected = oracle::knn(entries, embedder.embed(corpus[i]), 1);
        CHECK(hits.hits[0].item_id == expected[0].id);
    }
}

TEST_CASE("query_search basics") {
    HashEmbedder embedder(64);
    auto index = VectorIndex::from_entries({{"only", embedder.embed("lonely entry")}});
    auto hits = retrieval::query_search(index, embedder, "anything at all", 5);
    REQUIRE(hits.hits.size() == 1);
    CHECK(hits.hits[0].item_id == "only");

    VectorIndex empty;
    CHECK_THROWS_AS(static_cast<void>(retrieval::query_search(empty, embedder, "q", 1)),
                    NotFoundError);
    CHECK_THROWS_AS(static_cast<void>(retrieval::query_search(index, embedder, "q", 0)),
                    ConfigError);
}

TEST_CASE("query_search matches the exhaustive oracle on random vectors") {
    std::mt19937 rng(123);
    const std::size_t dim = 32;
    std::vector<std::pair<std::string, Vector>> entries;
    for (int i = 0; i < 400; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "v%04d", i);
        entries.emplace_back(id, random_vector(rng, dim));
    }
    auto index = VectorIndex::from_entries(entries);
    for (int q = 0; q < 25; ++q) {
        const Vector query = random_vector(rng, dim);
        auto got = retrieval::nearest(index, query, 10);
        auto expected = oracle::knn(entries, query, 10);
        REQUIRE(got.hits.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CHECK(got.hits[i].item_id == expected[i].id);
            CHECK(-got.hits[i].score == doctest::Approx(expected[i].distance));
        }
        // scores never increase down the list
        for (std::size_t i = 1; i < got.hits.size(); ++i)
            CHECK(got.hits[i - 1].score >= got.hits[i].score);
    }
}

TEST_CASE("item_search excludes the reference and finds its twin") {
    HashEmbedder embedder(128);
    auto index = VectorIndex::from_entries({{"A", embedder.embed("identical twin text")},
                                            {"B", embedder.embed("identical twin text")},
                                            {"C", embedder.embed("something else entirely")}});
    auto hits = retrieval::item_search(index, "A", 1);
    REQUIRE(hits.hits.size() == 1);
    CHECK(hits.hits[0].item_id == "B");
    CHECK(hits.hits[0].score == doctest::Approx(0.0));

    auto single = VectorIndex::from_entries({{"solo", embedder.embed("alone")}});
    CHECK(retrieval::item_search(single, "solo", 3).hits.empty());
    CHECK_THROWS_AS(static_cast<void>(retrieval::item_search(index, "nope", 1)), NotFoundError);
}

TEST_CASE("item_search matches the oracle with self-exclusion on 200 items") {
    std::mt19937 rng(77);
    std::vector<std::pair<std::string, Vector>> entries;
    for (int i = 0; i < 200; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "n%03d", i);
        entries.emplace_back(id, random_vector(rng, 16));
    }
    auto index = VectorIndex::from_entries(entries);
    for (int i = 0; i < 200; i += 17) {
        const std::string ref = entries[static_cast<std::size_t>(i)].first;
        auto got = retrieval::item_search(index, ref, 7);
        auto expected = oracle::knn(entries, entries[static_cast<std::size_t>(i)].second, 7, &ref);
        REQUIRE(got.hits.size() == expected.size());
        for (std::size_t j = 0; j < expected.size(); ++j)
            CHECK(got.hits[j].item_id == expected[j].id);
    }
}

TEST_CASE("partition_by_budget keeps the boundary price in budget") {
    auto cat = priced_catalog({{"A", 17.95}, {"B", 21.99}, {"C", 30.00}, {"D", 31.92}});
    retrieval::RetrievalResult hits;
    hits.hits = {{"A", -1.0}, {"B", -2.0}};
    auto split = retrieval::partition_by_budget(hits, cat, 17.75, 18.75);
    REQUIRE(split.in_budget.size() == 1);
    CHECK(split.in_budget[0].item_id == "A");
    REQUIRE(split.out_of_budget.size() == 1);
    CHECK(split.out_of_budget[0].item_id == "B");

    retrieval::RetrievalResult thirty;
    thirty.hits = {{"C", -1.0}};
    CHECK(retrieval::partition_by_budget(thirty, cat, 29.99, 31.92).in_budget.size() == 1);

    retrieval::RetrievalResult exact;
    exact.hits = {{"D", -1.0}};
    CHECK(retrieval::partition_by_budget(exact, cat, 29.99, 31.92).in_budget.size() == 1);
}

TEST_CASE("partition keeps order and covers the input exactly") {
    std::mt19937 rng(5);
    std::vector<std::pair<std::string, double>> priced;
    retrieval::RetrievalResult hits;
    for (int i = 0; i < 50; ++i) {
        const std::string id = "p" + std::to_string(i);
        priced.emplace_back(id, 5.0 + static_cast<double>(rng() % 500) / 10.0);
        hits.hits.push_back({id, -static_cast<double>(i)});
    }
    auto cat = priced_catalog(priced);
    auto split = retrieval::partition_by_budget(hits, cat, 10.0, 25.0);
    CHECK(split.in_budget.size() + split.out_of_budget.size() == hits.hits.size());
    for (const auto& hit : split.in_budget) CHECK(cat.require(hit.item_id).price <= 25.0);
    for (const auto& hit : split.out_of_budget) CHECK(cat.require(hit.item_id).price > 25.0);
    // order preserved within each side
    for (std::size_t i = 1; i < split.in_budget.size(); ++i)
        CHECK(split.in_budget[i - 1].score > split.in_budget[i].score);

    retrieval::RetrievalResult unknown;
    unknown.hits = {{"ghost", -1.0}};
    CHECK_THROWS_AS(static_cast<void>(retrieval::partition_by_budget(unknown, cat, 0, 10)),
                    NotFoundError);
}

TEST_CASE("index snapshot round-trips exactly") {
    testutil::TempDir tmp("index");
    HashEmbedder embedder(64);
    auto index = VectorIndex::from_entries({{"a", embedder.embed("first text")},
                                            {"b", embedder.embed("second text")}});
    const auto path = tmp.path("index.jsonl");
    index.save(path);
    auto loaded = VectorIndex::load(path);
    CHECK(loaded.size() == 2);
    CHECK(loaded.dim() == 64);
    CHECK(loaded.vector_of("a").values == index.vector_of("a").values);
}

}  // TEST_SUITE
