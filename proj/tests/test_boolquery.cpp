#include <doctest.h>

#include "citegraph/boolquery.hpp"
#include "citegraph/common/error.hpp"
#include "citegraph/common/rng.hpp"
#include "oracles.hpp"

using namespace citegraph;
using boolquery::ParseError;
using boolquery::QueryAst;

namespace {

corpus::PaperRecord doc(const std::string& id, const std::string& title,
                        const std::string& abstract, const std::string& domain = "d0") {
    corpus::PaperRecord rec;
    rec.paper_id = id;
    rec.title = title;
    rec.abstract = abstract;
    rec.domain = domain;
    return rec;
}

size_t parse_error_pos(const std::string& text) {
    try {
        boolquery::parse_query(text);
    } catch (const ParseError& e) {
        return e.position;
    }
    FAIL("expected a parse error for: ", text);
    return SIZE_MAX;
}

// Random corpora and queries for the oracle equivalence and monotonicity
// properties.
corpus::CorpusStore random_text_corpus(size_t n_docs, uint64_t seed) {
    Rng rng(seed);
    const std::vector<std::string> vocab = {
        "solar",  "perovskite", "stability", "gene",    "expression", "neural",
        "graph",  "quantum",    "protein",   "climate", "polymer",    "laser",
        "cell",   "membrane",   "catalyst",  "spectrum"};
    std::vector<corpus::PaperRecord> records;
    for (size_t i = 0; i < n_docs; ++i) {
        auto pick = [&] { return vocab[rng.below(vocab.size())]; };
        std::string title = pick() + " " + pick() + " " + pick();
        std::string abstract;
        size_t len = 5 + rng.below(15);
        for (size_t w = 0; w < len; ++w) {
            if (w) abstract += ' ';
            abstract += pick();
        }
        char buf[16];
        std::snprintf(buf, sizeof(buf), "t%05zu", i);
        records.push_back(doc(buf, title, abstract, rng.bernoulli(0.5) ? "d0" : "d1"));
    }
    return corpus::CorpusStore::from_records(std::move(records), {});
}

std::string random_query(Rng& rng) {
    const std::vector<std::string> vocab = {
        "solar", "perovskite", "stability", "gene",    "expression", "neural",
        "graph", "quantum",    "protein",   "climate", "polymer",    "laser"};
    auto pick = [&] { return vocab[rng.below(vocab.size())]; };
    std::string q;
    size_t groups = 1 + rng.below(3);
    for (size_t g = 0; g < groups; ++g) {
        if (g) q += rng.bernoulli(0.5) ? " AND " : " ";
        double kind = rng.uniform();
        if (kind < 0.5) {
            q += pick();
        } else if (kind < 0.75) {
            size_t atoms = 2 + rng.below(2);
            q += "(";
            for (size_t a = 0; a < atoms; ++a) {
                if (a) q += " OR ";
                q += pick();
            }
            q += ")";
        } else {
            q += "\"" + pick() + " " + pick() + "\"";
        }
    }
    return q;
}

}  // namespace

TEST_CASE("space-separated terms become singleton AND groups") {
    QueryAst ast = boolquery::parse_query("perovskite stability");
    REQUIRE(ast.groups.size() == 2);
    CHECK(ast.groups[0].atoms.size() == 1);
    CHECK(ast.groups[0].atoms[0].tokens == std::vector<std::string>{"perovskite"});
    CHECK_FALSE(ast.groups[0].atoms[0].is_phrase);
    CHECK(ast.groups[1].atoms[0].tokens == std::vector<std::string>{"stability"});
}

TEST_CASE("parenthesized OR lists are one group") {
    QueryAst ast = boolquery::parse_query("(solar OR photovoltaic) AND perovskite");
    REQUIRE(ast.groups.size() == 2);
    REQUIRE(ast.groups[0].atoms.size() == 2);
    CHECK(ast.groups[0].atoms[0].tokens == std::vector<std::string>{"solar"});
    CHECK(ast.groups[0].atoms[1].tokens == std::vector<std::string>{"photovoltaic"});
    CHECK(ast.groups[1].atoms.size() == 1);
}

TEST_CASE("keywords are case-insensitive") {
    QueryAst ast = boolquery::parse_query("a and (x or y)");
    REQUIRE(ast.groups.size() == 2);
    CHECK(ast.groups[1].atoms.size() == 2);
}

TEST_CASE("nested parentheses are rejected with their position") {
    CHECK(parse_error_pos("((a OR b) OR c)") == 1);
    CHECK(parse_error_pos("x AND (a OR (b OR c))") == 12);
}

TEST_CASE("malformed queries carry positions") {
    CHECK(parse_error_pos("") == 0);
    CHECK(parse_error_pos("   ") == 0);
    CHECK(parse_error_pos("()") == 1);
    CHECK(parse_error_pos("a OR b") == 2);           // top-level OR
    CHECK(parse_error_pos("(a AND b)") == 3);        // AND inside parens
    CHECK(parse_error_pos("(a OR)") == 5);           // dangling OR
    CHECK(parse_error_pos("(a b)") == 3);            // missing OR
    CHECK(parse_error_pos("AND a") == 0);            // leading AND
    CHECK(parse_error_pos("a AND") == 2);            // trailing AND
    CHECK(parse_error_pos("\"unterminated") == 0);   // open quote
    CHECK(parse_error_pos("(a OR b") == 0);          // unbalanced paren
    CHECK(parse_error_pos("a) b") == 1);             // stray close
    CHECK(parse_error_pos("a ?? b") == 2);           // token-free term
    CHECK(parse_error_pos("\"...\"") == 0);          // empty phrase
}

TEST_CASE("quoted strings become phrase atoms") {
    QueryAst ast = boolquery::parse_query("\"gene expression\" profiling");
    REQUIRE(ast.groups.size() == 2);
    CHECK(ast.groups[0].atoms[0].is_phrase);
    CHECK(ast.groups[0].atoms[0].tokens ==
          std::vector<std::string>{"gene", "expression"});
}

TEST_CASE("hyphenated words parse as adjacency phrases") {
    QueryAst ast = boolquery::parse_query("covid-19");
    REQUIRE(ast.groups.size() == 1);
    CHECK(ast.groups[0].atoms[0].is_phrase);
    CHECK(ast.groups[0].atoms[0].tokens == std::vector<std::string>{"covid", "19"});
}

TEST_CASE("print-parse is a fixed point") {
    std::vector<std::string> queries = {
        "perovskite stability",
        "(solar OR photovoltaic) AND perovskite",
        "\"gene expression\" (mouse OR rat) profiling",
        "covid-19 AND (vaccine OR booster)",
        "\"and\"",  // keyword-colliding token must stay quoted
        "(x OR \"deep learning\")",
    };
    for (const auto& q : queries) {
        QueryAst once = boolquery::parse_query(q);
        std::string printed = boolquery::print_query(once);
        QueryAst twice = boolquery::parse_query(printed);
        REQUIRE(once.groups.size() == twice.groups.size());
        for (size_t g = 0; g < once.groups.size(); ++g) {
            REQUIRE(once.groups[g].atoms.size() == twice.groups[g].atoms.size());
            for (size_t a = 0; a < once.groups[g].atoms.size(); ++a) {
                CHECK(once.groups[g].atoms[a].is_phrase == twice.groups[g].atoms[a].is_phrase);
                CHECK(once.groups[g].atoms[a].tokens == twice.groups[g].atoms[a].tokens);
            }
        }
        CHECK(boolquery::print_query(twice) == printed);
    }
}

TEST_CASE("phrases need adjacency, not just co-occurrence") {
    corpus::CorpusStore store = corpus::CorpusStore::from_records(
        {
            doc("match", "gene expression atlas", "profiling of gene expression in cells"),
            doc("nomatch", "expression of the gene", "the gene shows expression patterns"),
        },
        {});
    boolquery::InvertedIndex index = boolquery::InvertedIndex::build(store);
    auto hits = boolquery::evaluate(boolquery::parse_query("\"gene expression\""), index);
    CHECK(hits == std::vector<std::string>{"match"});
}

TEST_CASE("phrases do not straddle the title/abstract boundary") {
    corpus::CorpusStore store = corpus::CorpusStore::from_records(
        {doc("a", "ends with gene", "expression starts here")}, {});
    boolquery::InvertedIndex index = boolquery::InvertedIndex::build(store);
    CHECK(boolquery::evaluate(boolquery::parse_query("\"gene expression\""), index).empty());
    CHECK(boolquery::evaluate(boolquery::parse_query("gene expression"), index).size() == 1);
}

TEST_CASE("unknown tokens yield empty postings, not errors") {
    corpus::CorpusStore store =
        corpus::CorpusStore::from_records({doc("a", "solar cells", "stuff")}, {});
    boolquery::InvertedIndex index = boolquery::InvertedIndex::build(store);
    CHECK(boolquery::evaluate(boolquery::parse_query("unobtainium"), index).empty());
}

TEST_CASE("domain restriction filters results") {
    corpus::CorpusStore store = corpus::CorpusStore::from_records(
        {doc("a", "solar power", "x", "d0"), doc("b", "solar wind", "y", "d1")}, {});
    boolquery::InvertedIndex index = boolquery::InvertedIndex::build(store);
    QueryAst ast = boolquery::parse_query("solar");
    CHECK(boolquery::evaluate(ast, index).size() == 2);
    CHECK(boolquery::evaluate(ast, index, "d0") == std::vector<std::string>{"a"});
    CHECK(boolquery::evaluate(ast, index, "d1") == std::vector<std::string>{"b"});
    CHECK_THROWS_AS(boolquery::evaluate(ast, index, "nope"), InputError);
}

TEST_CASE("evaluate equals the full-scan matcher on random corpora") {
    corpus::CorpusStore store = random_text_corpus(1000, 2024);
    boolquery::InvertedIndex index = boolquery::InvertedIndex::build(store);
    Rng rng(55);
    size_t nonempty = 0;
    for (int i = 0; i < 100; ++i) {
        std::string q = random_query(rng);
        QueryAst ast = boolquery::parse_query(q);
        std::string domain = rng.bernoulli(0.3) ? "d0" : "";
        auto got = boolquery::evaluate(ast, index, domain);
        auto want = oracles::boolean_full_scan(ast, store, domain);
        CHECK(got == want);
        if (!want.empty()) ++nonempty;
    }
    CHECK(nonempty > 30);  // the comparison must not be vacuous
}

TEST_CASE("adding an AND group never enlarges the result") {
    corpus::CorpusStore store = random_text_corpus(500, 77);
    boolquery::InvertedIndex index = boolquery::InvertedIndex::build(store);
    Rng rng(7);
    for (int i = 0; i < 40; ++i) {
        std::string base = random_query(rng);
        auto before = boolquery::evaluate(boolquery::parse_query(base), index);
        auto after =
            boolquery::evaluate(boolquery::parse_query(base + " AND quantum"), index);
        CHECK(after.size() <= before.size());
        for (const auto& id : after)
            CHECK(std::binary_search(before.begin(), before.end(), id));
    }
}

TEST_CASE("adding an OR atom never shrinks a group") {
    corpus::CorpusStore store = random_text_corpus(500, 78);
    boolquery::InvertedIndex index = boolquery::InvertedIndex::build(store);
    auto narrow = boolquery::evaluate(boolquery::parse_query("(laser)"), index);
    auto wide = boolquery::evaluate(boolquery::parse_query("(laser OR protein)"), index);
    CHECK(wide.size() >= narrow.size());
    for (const auto& id : narrow) CHECK(std::binary_search(wide.begin(), wide.end(), id));
}

TEST_CASE("repeated-token phrases match runs") {
    corpus::CorpusStore store = corpus::CorpusStore::from_records(
        {doc("rep", "beating heart heart tissue", "x"), doc("single", "heart tissue", "y")}, {});
    boolquery::InvertedIndex index = boolquery::InvertedIndex::build(store);
    auto hits = boolquery::evaluate(boolquery::parse_query("\"heart heart\""), index);
    CHECK(hits == std::vector<std::string>{"rep"});
}
