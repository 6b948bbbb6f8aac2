#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "citegraph/common/error.hpp"
#include "citegraph/common/rng.hpp"
#include "citegraph/corpus.hpp"

using namespace citegraph;
using corpus::PaperRecord;

namespace {

PaperRecord make_record(const std::string& id, const std::string& title,
                        const std::string& abstract = "some abstract text", int year = 2015) {
    PaperRecord rec;
    rec.paper_id = id;
    rec.title = title;
    rec.abstract = abstract;
    rec.year = year;
    rec.domain = "d0";
    rec.source = "src";
    return rec;
}

std::string store_blob(const corpus::CorpusStore& store) {
    std::string out;
    for (const auto& rec : store.records()) {
        out += corpus::record_to_json_line(rec);
        for (const auto& s : store.sources_of(rec.paper_id)) out += "|" + s;
        out += "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("canonical doi lowercases and strips the resolver prefix") {
    CHECK(corpus::canonical_doi("10.1/X") == "10.1/x");
    CHECK(corpus::canonical_doi("HTTPS://DOI.ORG/10.1145/ABC") == "10.1145/abc");
    CHECK(corpus::canonical_doi("  10.5/y \n") == "10.5/y");
    CHECK(corpus::canonical_doi("") == "");
}

TEST_CASE("dedup key uses the doi when present") {
    PaperRecord rec = make_record("a", "Some Title");
    rec.doi = corpus::canonical_doi("10.1/X");
    CHECK(corpus::dedup_key(rec) == "10.1/x");
}

TEST_CASE("dedup key hash ignores case and whitespace in titles") {
    PaperRecord a = make_record("a", "Deep   Learning For Cats");
    PaperRecord b = make_record("b", "deep learning, for cats");
    a.authors = {"Jane Q. Doe"};
    b.authors = {"jane q doe"};
    CHECK(corpus::dedup_key(a) == corpus::dedup_key(b));

    PaperRecord c = b;
    c.year = 2016;
    CHECK(corpus::dedup_key(b) != corpus::dedup_key(c));

    PaperRecord d = b;
    d.authors = {"someone else"};
    CHECK(corpus::dedup_key(b) != corpus::dedup_key(d));
}

TEST_CASE("ingest of an empty stream gives an empty store") {
    corpus::IngestResult result = corpus::ingest({});
    CHECK(result.store.size() == 0);
    CHECK(result.dedup_of.empty());
}

TEST_CASE("same-doi records merge and the longer abstract wins") {
    PaperRecord a = make_record("a", "title a", "short");
    PaperRecord b = make_record("b", "title b", "a much longer abstract wins the merge");
    a.doi = "10.1/z";
    b.doi = "10.1/z";
    a.source = "s1";
    b.source = "s2";
    a.references = {"r1"};
    b.references = {"r2"};
    corpus::IngestResult result = corpus::ingest({a, b});
    REQUIRE(result.store.size() == 1);
    const PaperRecord& kept = result.store.records().front();
    CHECK(kept.paper_id == "b");
    CHECK(kept.abstract == "a much longer abstract wins the merge");
    // references and provenance union across the group
    CHECK(kept.references == std::vector<std::string>{"r1", "r2"});
    CHECK(result.store.sources_of("b") == std::vector<std::string>{"s1", "s2"});
    REQUIRE(result.dedup_of.size() == 1);
    CHECK(result.dedup_of.front() == std::pair<std::string, std::string>{"a", "b"});
}

TEST_CASE("1000 synthetic records with 100 planted doi duplicates give 900") {
    std::vector<PaperRecord> records;
    for (int i = 0; i < 900; ++i) {
        PaperRecord rec = make_record("p" + std::to_string(i), "title " + std::to_string(i),
                                      "abstract body " + std::to_string(i));
        rec.doi = "10.7/p" + std::to_string(i);
        records.push_back(rec);
    }
    for (int i = 0; i < 100; ++i) {
        PaperRecord twin = records[i];
        twin.paper_id = "twin" + std::to_string(i);
        twin.abstract = "x";
        records.push_back(twin);
    }
    REQUIRE(records.size() == 1000);
    corpus::IngestResult result = corpus::ingest(std::move(records));
    CHECK(result.store.size() == 900);
    CHECK(result.dedup_of.size() == 100);
}

TEST_CASE("ingestion is order independent, including transitive groups") {
    // a~b share a doi; b~c share a paper id: one group regardless of order.
    PaperRecord a = make_record("id1", "first", "aaaa");
    a.doi = "10.2/k";
    PaperRecord b = make_record("id2", "second", "bbbbbb");
    b.doi = "10.2/k";
    PaperRecord c = make_record("id2", "third", "cc");
    c.doi = "";
    std::vector<PaperRecord> records{a, b, c};
    for (int i = 0; i < 10; ++i) {
        PaperRecord extra = make_record("e" + std::to_string(i), "extra " + std::to_string(i));
        extra.references = {"e" + std::to_string((i + 1) % 10)};
        records.push_back(extra);
    }

    corpus::IngestResult first = corpus::ingest(records);
    std::string expected = store_blob(first.store);
    Rng rng(42);
    for (int trial = 0; trial < 6; ++trial) {
        rng.shuffle(records);
        corpus::IngestResult again = corpus::ingest(records);
        CHECK(store_blob(again.store) == expected);
        CHECK(again.dedup_of == first.dedup_of);
    }
}

TEST_CASE("self references are dropped at ingest") {
    PaperRecord a = make_record("a", "self citer");
    a.references = {"a", "b", "b"};
    corpus::IngestResult result = corpus::ingest({a});
    CHECK(result.n_self_references_dropped == 1);
    CHECK(result.store.get("a").references == std::vector<std::string>{"b"});
}

TEST_CASE("reject_conflicts policy drops whole groups") {
    PaperRecord a = make_record("a", "one", "aa");
    PaperRecord b = make_record("b", "two", "bb");
    a.doi = b.doi = "10.3/dup";
    corpus::IngestResult result =
        corpus::ingest({a, b, make_record("c", "three")}, corpus::ConflictPolicy::reject_conflicts);
    CHECK(result.store.size() == 1);
    CHECK(result.rejections.size() == 2);
}

TEST_CASE("filter removes short abstracts and early years") {
    std::vector<PaperRecord> records;
    records.push_back(make_record("a", "title a", std::string(149, 'x'), 2015));
    records.push_back(make_record("b", "title b", std::string(150, 'x'), 2015));
    records.push_back(make_record("c", "title c", std::string(200, 'x'), 2009));
    corpus::CorpusStore store = corpus::ingest(std::move(records)).store;

    corpus::FilterParams params;
    params.min_abstract_chars = 150;
    params.min_year = 2010;
    corpus::FilterResult result = corpus::filter_eligibility(store, params);
    CHECK(result.store.size() == 1);
    CHECK(result.store.contains("b"));
    CHECK(result.report.failed_abstract == 1);
    CHECK(result.report.failed_year == 1);
}

TEST_CASE("abstract length counts code points, not bytes") {
    // 149 two-byte characters: 298 bytes but short of 150 characters.
    std::string abstract;
    for (int i = 0; i < 149; ++i) abstract += "\xc3\xa9";
    corpus::CorpusStore store =
        corpus::ingest({make_record("a", "t", abstract, 2015)}).store;
    corpus::FilterParams params;
    params.min_abstract_chars = 150;
    params.min_year = 0;
    CHECK(corpus::filter_eligibility(store, params).store.size() == 0);
}

TEST_CASE("filter keeps eligible stores unchanged and is idempotent") {
    std::vector<PaperRecord> records;
    for (int i = 0; i < 20; ++i)
        records.push_back(
            make_record("p" + std::to_string(i), "t" + std::to_string(i), std::string(200, 'a')));
    corpus::CorpusStore store = corpus::ingest(std::move(records)).store;
    corpus::FilterParams params;
    corpus::FilterResult once = corpus::filter_eligibility(store, params);
    CHECK(once.store.size() == store.size());
    corpus::FilterResult twice = corpus::filter_eligibility(once.store, params);
    CHECK(store_blob(twice.store) == store_blob(once.store));
    CHECK(twice.report.removed == 0);
}

TEST_CASE("type filter applies only to typed records") {
    PaperRecord a = make_record("a", "title a", std::string(200, 'a'));
    a.type = "review";
    PaperRecord b = make_record("b", "title b", std::string(200, 'a'));
    b.type = "article";
    PaperRecord c = make_record("c", "title c", std::string(200, 'a'));
    c.type = "";
    corpus::CorpusStore store = corpus::ingest({a, b, c}).store;
    corpus::FilterParams params;
    params.allowed_types = {"article"};
    corpus::FilterResult result = corpus::filter_eligibility(store, params);
    CHECK(result.store.size() == 2);
    CHECK(result.store.contains("b"));
    CHECK(result.store.contains("c"));
    CHECK(result.report.failed_type == 1);
}

TEST_CASE("boilerplate patterns remove matching abstracts") {
    PaperRecord a = make_record("a", "title a", "No abstract available.");
    a.abstract = "No abstract available. " + std::string(180, 'x');
    PaperRecord b = make_record("b", "title b", std::string(200, 'y'));
    corpus::CorpusStore store = corpus::ingest({a, b}).store;
    corpus::FilterParams params;
    params.boilerplate_patterns = {"^no abstract"};
    corpus::FilterResult result = corpus::filter_eligibility(store, params);
    CHECK(result.store.size() == 1);
    CHECK(result.report.failed_boilerplate == 1);
}

TEST_CASE("stratified sample takes the whole pool when n equals pool size") {
    std::vector<PaperRecord> records;
    for (int i = 0; i < 10; ++i)
        records.push_back(make_record("p" + std::to_string(i), "pool title " + std::to_string(i), "a", 2010 + i % 3));
    corpus::CorpusStore store = corpus::ingest(std::move(records)).store;
    std::vector<std::string> sample = corpus::stratified_sample(store, 10, 1);
    CHECK(sample.size() == 10);
    CHECK(sample == store.ids());
}

TEST_CASE("stratified sample is deterministic under the seed") {
    std::vector<PaperRecord> records;
    for (int i = 0; i < 200; ++i)
        records.push_back(make_record("p" + std::to_string(i), "pool title " + std::to_string(i), "a", 2010 + i % 7));
    corpus::CorpusStore store = corpus::ingest(std::move(records)).store;
    auto s1 = corpus::stratified_sample(store, 50, 99);
    auto s2 = corpus::stratified_sample(store, 50, 99);
    CHECK(s1 == s2);
    auto s3 = corpus::stratified_sample(store, 50, 100);
    CHECK(s1 != s3);
}

TEST_CASE("year quotas follow the largest-remainder arithmetic") {
    // 60/40 split, n=10: exactly 6 and 4.
    std::vector<PaperRecord> records;
    for (int i = 0; i < 60; ++i)
        records.push_back(make_record("a" + std::to_string(i), "title a" + std::to_string(i), "a", 2010));
    for (int i = 0; i < 40; ++i)
        records.push_back(make_record("b" + std::to_string(i), "title b" + std::to_string(i), "a", 2020));
    corpus::CorpusStore store = corpus::ingest(std::move(records)).store;
    std::vector<std::string> sample = corpus::stratified_sample(store, 10, 5);
    size_t y2010 = 0, y2020 = 0;
    for (const auto& id : sample) {
        int year = *store.get(id).year;
        (year == 2010 ? y2010 : y2020) += 1;
    }
    CHECK(y2010 == 6);
    CHECK(y2020 == 4);

    // 5/3/3 split, n=7: floor quotas 3/1/1, remainders 2/10/10 -> b and c
    // each get one leftover: 3/2/2.
    std::vector<PaperRecord> rec2;
    for (int i = 0; i < 5; ++i) rec2.push_back(make_record("x" + std::to_string(i), "title x" + std::to_string(i), "a", 2011));
    for (int i = 0; i < 3; ++i) rec2.push_back(make_record("y" + std::to_string(i), "title y" + std::to_string(i), "a", 2012));
    for (int i = 0; i < 3; ++i) rec2.push_back(make_record("z" + std::to_string(i), "title z" + std::to_string(i), "a", 2013));
    corpus::CorpusStore store2 = corpus::ingest(std::move(rec2)).store;
    std::vector<std::string> sample2 = corpus::stratified_sample(store2, 7, 5);
    std::map<int, int> by_year;
    for (const auto& id : sample2) ++by_year[*store2.get(id).year];
    CHECK(by_year[2011] == 3);
    CHECK(by_year[2012] == 2);
    CHECK(by_year[2013] == 2);
}

TEST_CASE("under-populated domains fail with a named shortfall") {
    corpus::CorpusStore store = corpus::ingest({make_record("a", "t")}).store;
    try {
        corpus::stratified_sample(store, 5, 1);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        std::string msg = e.what();
        CHECK(msg.find("d0") != std::string::npos);
        CHECK(msg.find("shortfall 4") != std::string::npos);
    }
}

TEST_CASE("corpus jsonl round trips through write and read") {
    std::vector<PaperRecord> records;
    for (int i = 0; i < 5; ++i) {
        PaperRecord rec = make_record("p" + std::to_string(i), "Title " + std::to_string(i),
                                      "Abstract with ünïcode " + std::to_string(i));
        rec.references = {"r1", "r2"};
        rec.authors = {"A. Author"};
        rec.doi = i % 2 ? "10.1/p" + std::to_string(i) : "";
        records.push_back(rec);
    }
    corpus::CorpusStore store = corpus::ingest(std::move(records)).store;
    std::string path = std::filesystem::temp_directory_path() / "citegraph_corpus_rt.jsonl";
    corpus::write_corpus_jsonl(path, store);
    corpus::ParsedStream parsed = corpus::read_corpus_jsonl(path);
    CHECK(parsed.rejections.empty());
    corpus::CorpusStore again = corpus::ingest(std::move(parsed.records)).store;
    CHECK(store_blob(again) == store_blob(store));
    std::filesystem::remove(path);
}

TEST_CASE("malformed jsonl lines are rejected with their line numbers") {
    std::string path = std::filesystem::temp_directory_path() / "citegraph_corpus_bad.jsonl";
    {
        std::ofstream out(path);
        out << R"({"id":"ok1","title":"fine","abstract":"x"})" << "\n";
        out << "{not json}\n";
        out << R"({"id":"","title":"missing id"})" << "\n";
        out << R"({"id":"bad-year","title":"t","year":123})" << "\n";
        out << R"({"id":"ok2","title":"fine too"})" << "\n";
    }
    corpus::ParsedStream parsed = corpus::read_corpus_jsonl(path);
    CHECK(parsed.records.size() == 2);
    REQUIRE(parsed.rejections.size() == 3);
    CHECK(parsed.rejections[0].line == 2);
    CHECK(parsed.rejections[1].line == 3);
    CHECK(parsed.rejections[2].line == 4);
    std::filesystem::remove(path);
}
