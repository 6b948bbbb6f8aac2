#include <doctest.h>

#include <cmath>

#include "citegraph/common/error.hpp"
#include "citegraph/common/rng.hpp"
#include "citegraph/concordance.hpp"
#include "citegraph/synth.hpp"

using namespace citegraph;
using community::Partition;
using embeddings::NeighborTable;

namespace {

std::string id_of(size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "q%05zu", i);
    return buf;
}

// Neighbor table over n queries with k random neighbors each (cosines are
// irrelevant to the rates).
NeighborTable random_table(size_t n, uint32_t k, uint64_t seed) {
    NeighborTable table;
    table.k_max = k;
    for (size_t i = 0; i < n; ++i) table.pool_ids.push_back(id_of(i));
    Rng rng(seed);
    for (size_t q = 0; q < n; ++q) {
        for (uint32_t r = 0; r < k; ++r) {
            uint32_t nb;
            do {
                nb = static_cast<uint32_t>(rng.below(n));
            } while (nb == q);
            table.flat.push_back({nb, 1.0 - 0.001 * r});
        }
    }
    return table;
}

Partition uniform_partition(size_t n, uint32_t n_comm, uint64_t seed) {
    Partition p;
    p.n_communities = n_comm;
    Rng rng(seed);
    for (size_t i = 0; i < n; ++i) {
        p.ids.push_back(id_of(i));
        p.labels.push_back(static_cast<uint32_t>(rng.below(n_comm)));
    }
    return p;
}

}  // namespace

TEST_CASE("all-matching neighbors saturate both modes at 1") {
    NeighborTable table = random_table(50, 5, 1);
    Partition p;
    for (size_t i = 0; i < 50; ++i) {
        p.ids.push_back(id_of(i));
        p.labels.push_back(0);
    }
    p.n_communities = 1;
    for (auto mode : {concordance::RateMode::per_rank, concordance::RateMode::cumulative}) {
        auto result = concordance::same_rate(table, p, {1, 3, 5}, mode);
        for (auto [k, rate] : result.rates) CHECK(rate == 1.0);
    }
}

TEST_CASE("singleton partitions never match") {
    NeighborTable table = random_table(50, 5, 2);
    Partition p;
    for (size_t i = 0; i < 50; ++i) {
        p.ids.push_back(id_of(i));
        p.labels.push_back(static_cast<uint32_t>(i));
    }
    p.n_communities = 50;
    auto result = concordance::same_rate(table, p, {5}, concordance::RateMode::cumulative);
    CHECK(result.rates.at(5) == 0.0);
}

TEST_CASE("unlabeled ids are named in the error") {
    NeighborTable table = random_table(5, 2, 3);
    Partition p;
    for (size_t i = 0; i < 4; ++i) {
        p.ids.push_back(id_of(i));
        p.labels.push_back(0);
    }
    p.n_communities = 1;
    CHECK_THROWS_WITH_AS(
        concordance::same_rate(table, p, {1}, concordance::RateMode::per_rank),
        doctest::Contains("q00004"), InputError);
}

TEST_CASE("uniform random labels give chance-level cumulative rates") {
    const size_t n = 500;
    const uint32_t n_comm = 10, k = 10;
    NeighborTable table = random_table(n, k, 11);
    Partition p = uniform_partition(n, n_comm, 12);
    double b = concordance::chance_baseline(p, table.pool_ids);
    auto result = concordance::same_rate(table, p, {k}, concordance::RateMode::cumulative);
    double se = std::sqrt(b * (1 - b) / static_cast<double>(n * k));
    CHECK(std::abs(result.rates.at(k) - b) <= 3 * se);
}

TEST_CASE("chance baseline formula") {
    Partition p;
    for (size_t i = 0; i < 8; ++i) {
        p.ids.push_back(id_of(i));
        p.labels.push_back(i < 4 ? 0 : 1);
    }
    p.n_communities = 2;
    CHECK(concordance::chance_baseline(p, p.ids) == doctest::Approx(0.5).epsilon(1e-12));

    Partition one;
    one.ids = p.ids;
    one.labels.assign(8, 0);
    one.n_communities = 1;
    CHECK(concordance::chance_baseline(one, one.ids) == doctest::Approx(1.0));
    CHECK_THROWS_AS(concordance::chance_baseline(one, {}), InputError);
}

TEST_CASE("heavy-tailed community sizes reproduce the hand-summed baseline") {
    // 50 communities over a 959-paper pool; expected sum of squared shares
    // computed independently from the size list.
    std::vector<uint32_t> sizes = {116, 90, 75, 60, 52, 45, 40, 36, 33, 30, 28, 26, 24,
                                   22,  20, 19, 18, 17, 16, 15, 14, 13, 12, 11, 10, 10,
                                   9,   9,  8,  8,  7,  7,  6,  6,  5,  5,  5,  4,  4,
                                   4,   3,  3,  3,  2,  2,  2,  2,  1,  1,  1};
    Partition p;
    size_t idx = 0;
    for (uint32_t c = 0; c < sizes.size(); ++c)
        for (uint32_t i = 0; i < sizes[c]; ++i) {
            p.ids.push_back(id_of(idx++));
            p.labels.push_back(c);
        }
    p.n_communities = static_cast<uint32_t>(sizes.size());
    REQUIRE(p.ids.size() == 959);
    CHECK(concordance::chance_baseline(p, p.ids) ==
          doctest::Approx(0.05026634235131525).epsilon(1e-12));
}

TEST_CASE("baseline of equal communities is exactly 1/C") {
    for (uint32_t c : {2u, 5u, 20u}) {
        Partition p;
        for (size_t i = 0; i < size_t(40) * c; ++i) {
            p.ids.push_back(id_of(i));
            p.labels.push_back(static_cast<uint32_t>(i % c));
        }
        p.n_communities = c;
        double b = concordance::chance_baseline(p, p.ids);
        CHECK(b == doctest::Approx(1.0 / c).epsilon(1e-12));
    }
    // random sizes keep it within [1/C, 1]
    Partition p = uniform_partition(300, 7, 5);
    double b = concordance::chance_baseline(p, p.ids);
    CHECK(b >= 1.0 / 7 - 1e-12);
    CHECK(b <= 1.0);
}

TEST_CASE("enrichment is rate over baseline") {
    CHECK(concordance::enrichment(0.5, 0.5) == doctest::Approx(1.0));
    CHECK(concordance::enrichment(0.0, 0.5) == 0.0);
    CHECK(concordance::enrichment(0.21, 0.0002) == doctest::Approx(1050.0).epsilon(1e-9));
    CHECK_THROWS_AS(concordance::enrichment(0.3, 0.0), std::invalid_argument);
}

TEST_CASE("cumulative at k is exactly the mean of per-rank rates") {
    NeighborTable table = random_table(200, 10, 21);
    Partition p = uniform_partition(200, 6, 22);
    std::vector<uint32_t> all_ranks;
    for (uint32_t r = 1; r <= 10; ++r) all_ranks.push_back(r);
    auto per_rank = concordance::same_rate(table, p, all_ranks, concordance::RateMode::per_rank);
    auto cumulative =
        concordance::same_rate(table, p, {10}, concordance::RateMode::cumulative);
    // exact integer identity on the match counters
    uint64_t sum = 0;
    for (uint32_t r = 1; r <= 10; ++r) sum += per_rank.match_counts.at(r);
    CHECK(sum == cumulative.match_counts.at(10));
    double mean = 0;
    for (uint32_t r = 1; r <= 10; ++r) mean += per_rank.rates.at(r);
    mean /= 10.0;
    CHECK(std::abs(mean - cumulative.rates.at(10)) <= 1e-12);
}

TEST_CASE("permutation relabeling drives rates to chance") {
    const size_t n = 1200;
    const uint32_t k = 10;
    synth::PlantedSpec spec;
    spec.n_l1 = 2;
    spec.l2_per_l1 = 3;
    spec.papers_per_l2 = 200;
    spec.seed = 15;
    spec.embedding.l2_scale = 0.8;
    synth::PlantedBundle bundle = synth::generate(spec);
    REQUIRE(bundle.truth.ids.size() == n);
    NeighborTable table = embeddings::topk_neighbors(bundle.vectors, bundle.truth.ids, k);

    Partition truth = bundle.truth.to_partition(community::Level::L2);
    auto structured =
        concordance::same_rate(table, truth, {k}, concordance::RateMode::cumulative);

    // permute the community assignment over papers
    Partition shuffled = truth;
    Rng rng(99);
    rng.shuffle(shuffled.labels);
    auto null_rate =
        concordance::same_rate(table, shuffled, {k}, concordance::RateMode::cumulative);
    double b = concordance::chance_baseline(shuffled, table.pool_ids);
    double se = std::sqrt(b * (1 - b) / static_cast<double>(n * k));
    CHECK(std::abs(null_rate.rates.at(k) - b) <= 3 * se);
    CHECK(structured.rates.at(k) > b + 10 * se);  // the planted signal is far from null
}

TEST_CASE("report enrichment uses the report's own baseline") {
    synth::PlantedSpec spec;
    spec.n_l1 = 2;
    spec.papers_per_l2 = 30;
    spec.seed = 4;
    synth::PlantedBundle bundle = synth::generate(spec);
    NeighborTable table = embeddings::topk_neighbors(bundle.vectors, bundle.truth.ids, 10);
    Partition truth = bundle.truth.to_partition(community::Level::L1);
    auto report = concordance::make_report("toy", "all", "L1", table, truth, {2, 5, 10});
    for (auto [k, rate] : report.cumulative_topk)
        CHECK(report.enrichment_cumulative.at(k) ==
              doctest::Approx(rate / report.baseline).epsilon(1e-12));
    CHECK(report.n_queries == bundle.truth.ids.size());
}

TEST_CASE("lexical distinctiveness extremes") {
    auto doc = [](const std::string& id, const std::string& text, uint32_t l1, uint32_t l2) {
        corpus::PaperRecord rec;
        rec.paper_id = id;
        rec.title = text;
        rec.abstract = "";
        rec.domain = "dom";
        return std::pair(rec, std::pair(l1, l2));
    };
    auto build = [](const std::vector<std::pair<corpus::PaperRecord,
                                                std::pair<uint32_t, uint32_t>>>& docs) {
        std::vector<corpus::PaperRecord> records;
        Partition l1, l2;
        for (const auto& [rec, labels] : docs) {
            records.push_back(rec);
            l1.ids.push_back(rec.paper_id);
            l1.labels.push_back(labels.first);
            l2.labels.push_back(labels.second);
        }
        l2.ids = l1.ids;
        l1.n_communities = *std::max_element(l1.labels.begin(), l1.labels.end()) + 1;
        l2.n_communities = *std::max_element(l2.labels.begin(), l2.labels.end()) + 1;
        return std::tuple(corpus::CorpusStore::from_records(std::move(records), {}), l1, l2);
    };

    // disjoint vocabularies: everything is unique to one child
    auto [store1, l1a, l2a] = build({
        doc("a1", "alpha beta", 0, 0),
        doc("a2", "alpha gamma", 0, 0),
        doc("b1", "delta epsilon", 0, 1),
        doc("b2", "delta zeta", 0, 1),
    });
    auto lex1 = concordance::lexical_distinctiveness(store1, l1a, l2a);
    CHECK(lex1.by_domain.at("dom") == doctest::Approx(1.0));

    // identical token streams: nothing is unique
    auto [store2, l1b, l2b] = build({
        doc("a1", "alpha beta gamma", 0, 0),
        doc("b1", "alpha beta gamma", 0, 1),
    });
    auto lex2 = concordance::lexical_distinctiveness(store2, l1b, l2b);
    CHECK(lex2.by_domain.at("dom") == doctest::Approx(0.0));

    // single-child parents are skipped
    auto [store3, l1c, l2c] = build({doc("a1", "alpha", 0, 0), doc("a2", "beta", 0, 0)});
    auto lex3 = concordance::lexical_distinctiveness(store3, l1c, l2c);
    CHECK(lex3.by_domain.empty());
    CHECK(lex3.skipped_single_child == 1);
}

TEST_CASE("planted 30% unique mass is recovered") {
    // 3 children x 4 docs; every token type has df=2 and tf=1 per doc, so
    // TF-IDF mass is uniform per occurrence and the distinct fraction is
    // exactly the unique-slot share: 3 of 10 slots per doc.
    std::vector<corpus::PaperRecord> records;
    Partition l1, l2;
    std::vector<std::vector<std::string>> doc_tokens(12);
    auto doc_index = [](uint32_t child, uint32_t i) { return child * 4 + i; };
    for (uint32_t child = 0; child < 3; ++child) {
        for (uint32_t i = 0; i < 4; ++i) {
            // 3 unique slots per doc; "x" types live in docs i and i+1 of
            // the child, "y" types in docs 2j and 2j+1, so every type has
            // df=2 within its child.
            auto& toks = doc_tokens[doc_index(child, i)];
            toks.push_back("u" + std::to_string(child) + "x" + std::to_string(i));
            toks.push_back("u" + std::to_string(child) + "x" + std::to_string((i + 1) % 4));
            toks.push_back("u" + std::to_string(child) + "y" + std::to_string(i / 2));
        }
    }
    // Shared tokens: 14 types per child pair, one slot on each side. The
    // first pair member cycles docs 0,1,2,3,..., the second cycles 2,3,0,1:
    // over the pair cycle (0,1),(1,2),(2,0) every doc collects 4+3=7 slots.
    const std::pair<uint32_t, uint32_t> pairs[3] = {{0, 1}, {1, 2}, {2, 0}};
    for (uint32_t idx = 0; idx < 3; ++idx) {
        auto [a, b] = pairs[idx];
        for (uint32_t t = 0; t < 14; ++t) {
            std::string tok = "s" + std::to_string(idx) + "t" + std::to_string(t);
            doc_tokens[doc_index(a, t % 4)].push_back(tok);
            doc_tokens[doc_index(b, (t + 2) % 4)].push_back(tok);
        }
    }
    for (uint32_t child = 0; child < 3; ++child) {
        for (uint32_t i = 0; i < 4; ++i) {
            corpus::PaperRecord rec;
            rec.paper_id = "d" + std::to_string(child) + std::to_string(i);
            std::string text;
            for (const auto& t : doc_tokens[doc_index(child, i)]) text += t + " ";
            rec.title = text;
            rec.domain = "dom";
            records.push_back(rec);
            l1.ids.push_back(rec.paper_id);
            l1.labels.push_back(0);
            l2.labels.push_back(child);
        }
    }
    // all docs have 3 unique + 7 shared slots
    for (const auto& toks : doc_tokens) REQUIRE(toks.size() == 10);
    l2.ids = l1.ids;
    l1.n_communities = 1;
    l2.n_communities = 3;
    corpus::CorpusStore store = corpus::CorpusStore::from_records(std::move(records), {});
    auto lex = concordance::lexical_distinctiveness(store, l1, l2);
    CHECK(std::abs(lex.by_domain.at("dom") - 0.30) <= 0.02);
}
