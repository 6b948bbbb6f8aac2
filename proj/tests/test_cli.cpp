#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "citegraph/cli.hpp"
#include "citegraph/common/io.hpp"

namespace fs = std::filesystem;
using citegraph::cli::run;

namespace {

int run_cli(std::vector<std::string> args) {
    std::vector<const char*> argv = {"citegraph"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("citegraph_cli_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("unknown subcommands and missing inputs map to usage/input errors") {
    CHECK(run_cli({"frobnicate"}) == 2);
    CHECK(run_cli({}) == 2);
    CHECK(run_cli({"ingest", "--input", "/nonexistent/path.jsonl"}) == 3);
    CHECK(run_cli({"partition", "--edges", "/nonexistent/edges.csv"}) == 3);
}

TEST_CASE("the full pipeline runs end to end and is reproducible") {
    TempDir dir;
    std::string s = dir / "s";
    REQUIRE(run_cli({"synth", "--out-dir", s, "--seed", "7", "--queries", "6",
                     "--duplicates", "4", "--orphan-frac", "0.1", "--p-cite-l1", "0.002",
                     "--p-cite-canonical", "0.5"}) == 0);
    CHECK(fs::exists(s + "/corpus.jsonl"));
    CHECK(fs::exists(s + "/corpus.jsonl.manifest.json"));

    REQUIRE(run_cli({"ingest", "--input", s + "/corpus.jsonl", "--output", dir / "store.jsonl",
                     "--min-abstract-chars", "50"}) == 0);
    CHECK(fs::exists(dir / "store.jsonl.dedup.jsonl"));

    REQUIRE(run_cli({"build-graph", "--store", dir / "store.jsonl", "--citers",
                     s + "/citers.jsonl", "--output", dir / "edges.csv"}) == 0);
    CHECK(fs::exists(dir / "edges.csv.orphans.txt"));

    REQUIRE(run_cli({"partition", "--edges", dir / "edges.csv", "--output", dir / "part.tsv",
                     "--split-min", "50", "--seed", "3"}) == 0);
    CHECK(fs::exists(dir / "part.tsv.stats.json"));

    REQUIRE(run_cli({"sweep", "--edges", dir / "edges.csv", "--gammas", "0.0001", "0.01",
                     "--output", dir / "sweep.json", "--seed", "3"}) == 0);

    REQUIRE(run_cli({"knn", "--vectors", s + "/vectors.jsonl", "--store", dir / "store.jsonl",
                     "--partition", dir / "part.tsv", "--k", "15", "--output",
                     dir / "nn.jsonl"}) == 0);

    REQUIRE(run_cli({"concordance", "--neighbors", dir / "nn.jsonl", "--partition",
                     dir / "part.tsv", "--store", dir / "store.jsonl", "--output",
                     dir / "conc.json", "--csv-out", dir / "conc.csv", "--lexdist-out",
                     dir / "lex.json", "--ks", "2", "5", "10"}) == 0);

    REQUIRE(run_cli({"retrieve", "--queries", s + "/queries.jsonl", "--store",
                     dir / "store.jsonl", "--retriever", "bm25", "--output",
                     dir / "bm25_runs.jsonl"}) == 0);
    REQUIRE(run_cli({"retrieve", "--queries", s + "/queries.jsonl", "--store",
                     dir / "store.jsonl", "--retriever", "bm25cite", "--output",
                     dir / "cite_runs.jsonl"}) == 0);
    REQUIRE(run_cli({"retrieve", "--fuse", dir / "bm25_runs.jsonl", dir / "cite_runs.jsonl",
                     "--output", dir / "rrf_runs.jsonl"}) == 0);

    REQUIRE(run_cli({"bench", "--queries", s + "/queries.jsonl", "--store", dir / "store.jsonl",
                     "--partition", dir / "part.tsv", "--vectors", s + "/vectors.jsonl",
                     "--query-vectors", s + "/query_vectors.jsonl", "--output",
                     dir / "bench.csv", "--runs-out", dir / "runs.jsonl"}) == 0);

    REQUIRE(run_cli({"report", "--concordance", dir / "conc.json", "--bench", dir / "bench.csv",
                     "--out-dir", dir / "figs"}) == 0);
    CHECK(fs::exists(dir / "figs/fig1_hierarchical.csv"));
    CHECK(fs::exists(dir / "figs/fig2_rank_sweep.csv"));
    CHECK(fs::exists(dir / "figs/fig3_l1_l2_drop.csv"));
    CHECK(fs::exists(dir / "figs/fig4_retrieval.csv"));

    // identical config reruns produce byte-identical primary outputs and
    // the same manifest config hash
    auto config_hash = [&](const std::string& manifest_path) {
        std::string text = citegraph::io::read_file(manifest_path);
        size_t at = text.find("config_hash");
        REQUIRE(at != std::string::npos);
        return text.substr(at, 40);
    };
    std::string edges_first = citegraph::io::read_file(dir / "edges.csv");
    std::string part_first = citegraph::io::read_file(dir / "part.tsv");
    std::string hash_first = config_hash(dir / "edges.csv.manifest.json");
    REQUIRE(run_cli({"build-graph", "--store", dir / "store.jsonl", "--citers",
                     s + "/citers.jsonl", "--output", dir / "edges.csv"}) == 0);
    REQUIRE(run_cli({"partition", "--edges", dir / "edges.csv", "--output", dir / "part.tsv",
                     "--split-min", "50", "--seed", "3"}) == 0);
    CHECK(citegraph::io::read_file(dir / "edges.csv") == edges_first);
    CHECK(citegraph::io::read_file(dir / "part.tsv") == part_first);
    CHECK(config_hash(dir / "edges.csv.manifest.json") == hash_first);
}

TEST_CASE("config files feed flags and the command line wins") {
    TempDir dir;
    std::string s = dir / "s";
    REQUIRE(run_cli({"synth", "--out-dir", s, "--seed", "5"}) == 0);
    REQUIRE(run_cli({"ingest", "--input", s + "/corpus.jsonl", "--output", dir / "store.jsonl",
                     "--no-filter"}) == 0);
    REQUIRE(run_cli({"build-graph", "--store", dir / "store.jsonl", "--citers",
                     s + "/citers.jsonl", "--output", dir / "edges.csv"}) == 0);

    std::string config = dir / "run.ini";
    {
        std::ofstream out(config);
        out << "[partition]\n";
        out << "edges=\"" << (dir / "edges.csv") << "\"\n";
        out << "output=\"" << (dir / "cfg_part.tsv") << "\"\n";
        out << "gamma-l2=0.01\n";
        out << "split-min=50\n";
        out << "seed=9\n";
    }
    REQUIRE(run_cli({"--config", config, "partition"}) == 0);
    CHECK(fs::exists(dir / "cfg_part.tsv"));

    // a flag override changes the output relative to the config value
    REQUIRE(run_cli({"--config", config, "partition", "--output", dir / "cfg_part2.tsv",
                     "--split-min", "100000"}) == 0);
    std::string a = citegraph::io::read_file(dir / "cfg_part.tsv");
    std::string b = citegraph::io::read_file(dir / "cfg_part2.tsv");
    // with split-min huge, no L1 splits: every l2 id equals the l1 id
    CHECK(a != b);
}

TEST_CASE("failed runs leave no partial primary outputs") {
    TempDir dir;
    // corpus path exists but the store is malformed json
    std::string bad = dir / "bad.jsonl";
    {
        std::ofstream out(bad);
        out << "{\"id\":\"a\",\"title\":\"x\"}\n";
        out << "{{{\n";
    }
    std::string out_path = dir / "never.csv";
    CHECK(run_cli({"build-graph", "--store", bad, "--output", out_path}) == 3);
    CHECK_FALSE(fs::exists(out_path));
    CHECK_FALSE(fs::exists(out_path + ".tmp"));
}
