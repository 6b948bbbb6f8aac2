#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "citegraph/common/error.hpp"
#include "citegraph/common/rng.hpp"
#include "citegraph/embeddings.hpp"
#include "oracles.hpp"

using namespace citegraph;
using embeddings::EmbeddingSet;

namespace {

EmbeddingSet random_unit_set(size_t n, uint32_t dim, uint64_t seed,
                             const std::string& prefix = "v") {
    Rng rng(seed);
    std::vector<std::string> ids;
    std::vector<float> data;
    for (size_t i = 0; i < n; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%s%05zu", prefix.c_str(), i);
        ids.push_back(buf);
        for (uint32_t d = 0; d < dim; ++d) data.push_back(static_cast<float>(rng.normal()));
    }
    return EmbeddingSet("test", dim, std::move(ids), std::move(data)).normalized();
}

std::filesystem::path tmp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("loading a small vector file") {
    auto path = tmp_file("citegraph_vec3.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"a","vector":[1,0,0,0]})" << "\n";
        out << R"({"id":"b","vector":[0,1,0,0]})" << "\n";
        out << R"({"id":"c","vector":[0,0,0.5,0.5]})" << "\n";
    }
    EmbeddingSet set = embeddings::load_vectors(path);
    CHECK(set.dim() == 4);
    CHECK(set.size() == 3);
    CHECK(set.contains("b"));
    std::filesystem::remove(path);
}

TEST_CASE("vector file errors name the offending id") {
    auto path = tmp_file("citegraph_vec_bad.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"fine","vector":[1,0]})" << "\n";
        out << R"({"id":"nanrow","vector":[1,null]})" << "\n";
    }
    {
        std::ofstream out(path, std::ios::app);
    }
    CHECK_THROWS_WITH_AS(embeddings::load_vectors(path),
                         doctest::Contains("nanrow"), InputError);
    {
        std::ofstream out(path);
        out << R"({"id":"fine","vector":[1,0]})" << "\n";
        out << R"({"id":"short","vector":[1]})" << "\n";
    }
    CHECK_THROWS_WITH_AS(embeddings::load_vectors(path),
                         doctest::Contains("short"), InputError);
    {
        std::ofstream out(path);
        out << R"({"id":"dup","vector":[1,0]})" << "\n";
        out << R"({"id":"dup","vector":[0,1]})" << "\n";
    }
    CHECK_THROWS_WITH_AS(embeddings::load_vectors(path),
                         doctest::Contains("dup"), InputError);
    std::filesystem::remove(path);
}

TEST_CASE("normalize scales (3,4) to (0.6,0.8) and is idempotent") {
    EmbeddingSet set("m", 2, {"p"}, {3.0f, 4.0f});
    EmbeddingSet unit = set.normalized();
    CHECK(unit.vector_of("p")[0] == doctest::Approx(0.6).epsilon(1e-7));
    CHECK(unit.vector_of("p")[1] == doctest::Approx(0.8).epsilon(1e-7));
    EmbeddingSet twice = unit.normalized();
    for (int d = 0; d < 2; ++d)
        CHECK(std::abs(twice.vector_of("p")[d] - unit.vector_of("p")[d]) <= 1e-7);
}

TEST_CASE("normalize rejects zero vectors by id") {
    EmbeddingSet set("m", 2, {"ok", "zero"}, {1.0f, 0.0f, 0.0f, 0.0f});
    CHECK_THROWS_WITH_AS(set.normalized(), doctest::Contains("zero"), InputError);
}

TEST_CASE("random set normalizes to unit norms within 1e-6") {
    EmbeddingSet set = random_unit_set(100, 48, 8);
    CHECK(set.max_norm_deviation() <= 1e-6);
}

TEST_CASE("text round trip preserves values to 1e-7") {
    EmbeddingSet set = random_unit_set(20, 16, 9);
    auto path = tmp_file("citegraph_vec_rt.jsonl");
    embeddings::write_vectors_jsonl(path, set);
    EmbeddingSet again = embeddings::load_vectors(path);
    REQUIRE(again.size() == set.size());
    REQUIRE(again.dim() == set.dim());
    for (size_t i = 0; i < set.size(); ++i)
        for (uint32_t d = 0; d < set.dim(); ++d)
            CHECK(std::abs(again.row(i)[d] - set.row(i)[d]) <= 1e-7);
    std::filesystem::remove(path);
}

TEST_CASE("binary cache round trips exactly") {
    EmbeddingSet set = random_unit_set(33, 24, 10);
    auto path = tmp_file("citegraph_vec_rt.bin");
    embeddings::write_vectors_binary(path, set);
    EmbeddingSet again = embeddings::load_vectors_binary(path);
    REQUIRE(again.size() == set.size());
    CHECK(again.ids() == set.ids());
    for (size_t i = 0; i < set.size(); ++i)
        for (uint32_t d = 0; d < set.dim(); ++d)
            CHECK(again.row(i)[d] == set.row(i)[d]);
    std::filesystem::remove(path);
}

TEST_CASE("orthonormal basis neighbors are all-zero cosine in id order") {
    const uint32_t dim = 6;
    std::vector<std::string> ids;
    std::vector<float> data(dim * dim, 0.0f);
    for (uint32_t i = 0; i < dim; ++i) {
        ids.push_back("e" + std::to_string(i));
        data[i * dim + i] = 1.0f;
    }
    EmbeddingSet set("basis", dim, ids, data);
    embeddings::NeighborTable table = embeddings::topk_neighbors(set, ids, 3);
    for (size_t q = 0; q < table.pool_ids.size(); ++q) {
        const embeddings::Neighbor* row = table.row(q);
        uint32_t expect = 0;
        for (uint32_t r = 0; r < 3; ++r) {
            CHECK(row[r].cosine == 0.0);
            if (expect == q) ++expect;  // self excluded
            CHECK(row[r].pool_index == expect);  // ascending id tie-break
            ++expect;
        }
    }
}

TEST_CASE("an exact duplicate vector lands at rank 1 with cosine 1") {
    EmbeddingSet set("m", 3, {"orig", "twin", "other"},
                     {1, 0, 0, 1, 0, 0, 0, 1, 0});
    embeddings::NeighborTable table =
        embeddings::topk_neighbors(set, {"orig", "twin", "other"}, 1);
    // pool_ids sorted: orig is index 0? sorted: orig, other, twin
    size_t orig_row = 0;
    while (table.pool_ids[orig_row] != "orig") ++orig_row;
    CHECK(table.neighbor_id(table.row(orig_row)[0]) == "twin");
    CHECK(table.row(orig_row)[0].cosine == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("topk equals the dense oracle id-for-id") {
    EmbeddingSet set = random_unit_set(300, 16, 77);
    std::vector<std::string> pool(set.ids().begin(), set.ids().begin() + 250);
    embeddings::NeighborTable table = embeddings::topk_neighbors(set, pool, 12);
    auto oracle = oracles::knn_brute_force(set, pool, 12);
    for (size_t q = 0; q < pool.size(); ++q) {
        const embeddings::Neighbor* row = table.row(q);
        for (uint32_t r = 0; r < 12; ++r) {
            CHECK(table.neighbor_id(row[r]) == oracle[q][r].id);
            CHECK(row[r].cosine == doctest::Approx(oracle[q][r].cos).epsilon(1e-12));
        }
    }
}

TEST_CASE("worker count does not change the table") {
    EmbeddingSet set = random_unit_set(150, 8, 5);
    embeddings::NeighborTable a = embeddings::topk_neighbors(set, set.ids(), 7, 1);
    embeddings::NeighborTable b = embeddings::topk_neighbors(set, set.ids(), 7, 4);
    REQUIRE(a.flat.size() == b.flat.size());
    for (size_t i = 0; i < a.flat.size(); ++i) {
        CHECK(a.flat[i].pool_index == b.flat[i].pool_index);
        CHECK(a.flat[i].cosine == b.flat[i].cosine);
    }
}

TEST_CASE("scaling raw vectors leaves the neighbor table unchanged") {
    Rng rng(31);
    std::vector<std::string> ids;
    std::vector<float> raw;
    for (int i = 0; i < 60; ++i) {
        ids.push_back("s" + std::to_string(100 + i));
        for (int d = 0; d < 10; ++d) raw.push_back(static_cast<float>(rng.normal()));
    }
    std::vector<float> scaled(raw);
    for (auto& x : scaled) x *= 37.5f;
    EmbeddingSet a = EmbeddingSet("m", 10, ids, raw).normalized();
    EmbeddingSet b = EmbeddingSet("m", 10, ids, scaled).normalized();
    embeddings::NeighborTable ta = embeddings::topk_neighbors(a, ids, 5);
    embeddings::NeighborTable tb = embeddings::topk_neighbors(b, ids, 5);
    for (size_t i = 0; i < ta.flat.size(); ++i) {
        CHECK(ta.flat[i].pool_index == tb.flat[i].pool_index);
        CHECK(ta.flat[i].cosine == doctest::Approx(tb.flat[i].cosine).epsilon(1e-6));
    }
}

TEST_CASE("cosines recomputed from the other endpoint agree within 1e-6") {
    EmbeddingSet set = random_unit_set(80, 12, 13);
    embeddings::NeighborTable table = embeddings::topk_neighbors(set, set.ids(), 10);
    for (size_t q = 0; q < table.pool_ids.size(); ++q) {
        const embeddings::Neighbor* row = table.row(q);
        for (uint32_t r = 0; r < table.k_max; ++r) {
            const float* a = set.vector_of(table.pool_ids[q]);
            const float* b = set.vector_of(table.neighbor_id(row[r]));
            double dot = 0;
            for (uint32_t d = 0; d < set.dim(); ++d)
                dot += static_cast<double>(b[d]) * static_cast<double>(a[d]);
            CHECK(std::abs(dot - row[r].cosine) <= 1e-6);
        }
    }
}

TEST_CASE("k must be smaller than the pool") {
    EmbeddingSet set = random_unit_set(5, 4, 3);
    CHECK_THROWS_AS(embeddings::topk_neighbors(set, set.ids(), 5), std::invalid_argument);
    CHECK_THROWS_AS(embeddings::topk_neighbors(set, set.ids(), 0), std::invalid_argument);
}

TEST_CASE("pool ids without vectors are named in the error") {
    EmbeddingSet set = random_unit_set(5, 4, 3);
    std::vector<std::string> pool = set.ids();
    pool.push_back("ghost");
    CHECK_THROWS_WITH_AS(embeddings::topk_neighbors(set, pool, 2),
                         doctest::Contains("ghost"), InputError);
}

TEST_CASE("neighbor tables round trip through jsonl") {
    EmbeddingSet set = random_unit_set(40, 8, 21);
    embeddings::NeighborTable table = embeddings::topk_neighbors(set, set.ids(), 6);
    auto path = tmp_file("citegraph_nn_rt.jsonl");
    embeddings::write_neighbors_jsonl(path, table);
    embeddings::NeighborTable again = embeddings::read_neighbors_jsonl(path);
    CHECK(again.k_max == table.k_max);
    CHECK(again.pool_ids == table.pool_ids);
    for (size_t i = 0; i < table.flat.size(); ++i) {
        CHECK(again.flat[i].pool_index == table.flat[i].pool_index);
        CHECK(again.flat[i].cosine == table.flat[i].cosine);  // exact via to_chars
    }
    std::filesystem::remove(path);
}
