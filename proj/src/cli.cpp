#include "citegraph/cli.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "citegraph/boolquery.hpp"
#include "citegraph/common/error.hpp"
#include "citegraph/common/io.hpp"
#include "citegraph/common/parallel.hpp"
#include "citegraph/common/rng.hpp"
#include "citegraph/community.hpp"
#include "citegraph/concordance.hpp"
#include "citegraph/corpus.hpp"
#include "citegraph/embeddings.hpp"
#include "citegraph/graph.hpp"
#include "citegraph/retrieval.hpp"
#include "citegraph/synth.hpp"

using ordered_json = nlohmann::ordered_json;

namespace citegraph::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

void log(const std::string& msg) { std::cerr << "[citegraph] " << msg << "\n"; }

// Per-run provenance sidecar: everything needed to reproduce the primary
// outputs, plus wall clock. Not part of the determinism contract.
class Manifest {
  public:
    Manifest(std::string subcommand) : subcommand_(std::move(subcommand)) {
        start_ = std::chrono::steady_clock::now();
    }
    void set(const std::string& key, const std::string& value) {
        config_.emplace_back(key, value);
    }
    void set(const std::string& key, double value) { set(key, io::format_double(value)); }
    void set(const std::string& key, uint64_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, int value) { set(key, std::to_string(value)); }
    void input(const std::string& path) { inputs_.push_back(path); }
    void output(const std::string& path) { outputs_.push_back(path); }

    void write() const {
        if (outputs_.empty()) return;
        uint64_t hash = 14695981039346656037ULL;
        for (const auto& [k, v] : config_) hash = fnv1a64(k + "=" + v + "\n", hash);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start_)
                      .count();
        ordered_json j;
        j["subcommand"] = subcommand_;
        j["version"] = kVersion;
        ordered_json cfg = ordered_json::object();
        for (const auto& [k, v] : config_) cfg[k] = v;
        j["config"] = cfg;
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
        j["config_hash"] = hex;
        j["inputs"] = inputs_;
        j["outputs"] = outputs_;
        j["wall_clock_ms"] = ms;
        io::atomic_write(outputs_.front() + ".manifest.json",
                         [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    }

  private:
    std::string subcommand_;
    std::vector<std::pair<std::string, std::string>> config_;
    std::vector<std::string> inputs_, outputs_;
    std::chrono::steady_clock::time_point start_;
};

corpus::CorpusStore load_store(const std::string& path) {
    corpus::ParsedStream parsed = corpus::read_corpus_jsonl(path);
    if (!parsed.rejections.empty())
        throw InputError(path + ": " + std::to_string(parsed.rejections.size()) +
                         " malformed records (line " +
                         std::to_string(parsed.rejections.front().line) + ": " +
                         parsed.rejections.front().reason + "); run ingest first");
    for (auto& rec : parsed.records) {
        std::sort(rec.references.begin(), rec.references.end());
        rec.references.erase(std::unique(rec.references.begin(), rec.references.end()),
                             rec.references.end());
        auto self = std::lower_bound(rec.references.begin(), rec.references.end(), rec.paper_id);
        if (self != rec.references.end() && *self == rec.paper_id) rec.references.erase(self);
    }
    try {
        return corpus::CorpusStore::from_records(std::move(parsed.records), {});
    } catch (const std::logic_error& e) {
        throw InputError(path + ": " + e.what() + " (run ingest first)");
    }
}

// Restrict a neighbor table to a subset of its queries. The subset must be
// closed under the neighbor relation (true for per-domain pools).
embeddings::NeighborTable subset_table(const embeddings::NeighborTable& table,
                                       const std::vector<std::string>& ids) {
    std::unordered_map<std::string, uint32_t> new_index;
    embeddings::NeighborTable out;
    out.k_max = table.k_max;
    for (const auto& id : ids) {
        new_index.emplace(id, static_cast<uint32_t>(out.pool_ids.size()));
        out.pool_ids.push_back(id);
    }
    out.flat.reserve(ids.size() * table.k_max);
    for (size_t q = 0; q < table.pool_ids.size(); ++q) {
        if (!new_index.count(table.pool_ids[q])) continue;
        const embeddings::Neighbor* row = table.row(q);
        for (uint32_t i = 0; i < table.k_max; ++i) {
            auto it = new_index.find(table.neighbor_id(row[i]));
            if (it == new_index.end())
                throw InputError("neighbor table is not closed over the domain pool (id " +
                                 table.neighbor_id(row[i]) + ")");
            out.flat.push_back({it->second, row[i].cosine});
        }
    }
    return out;
}

struct SynthArgs {
    std::string out_dir = "synth_out";
    synth::PlantedSpec spec;
    uint32_t n_queries = 0;
};

int cmd_synth(const SynthArgs& args) {
    Manifest manifest("synth");
    synth::PlantedSpec spec = args.spec;
    spec.n_queries = args.n_queries;
    manifest.set("seed", static_cast<uint64_t>(spec.seed));
    manifest.set("n_l1", static_cast<uint64_t>(spec.n_l1));
    manifest.set("l2_per_l1", static_cast<uint64_t>(spec.l2_per_l1));
    manifest.set("papers_per_l2", static_cast<uint64_t>(spec.papers_per_l2));
    manifest.set("p_ref_in_l2", spec.p_ref_in_l2);
    manifest.set("p_ref_in_l1", spec.p_ref_in_l1);
    manifest.set("p_ref_cross", spec.p_ref_cross);
    manifest.set("orphan_frac", spec.orphan_frac);
    manifest.set("planted_duplicates", static_cast<uint64_t>(spec.planted_duplicates));
    manifest.set("n_queries", static_cast<uint64_t>(spec.n_queries));

    synth::PlantedBundle bundle = synth::generate(spec);
    const std::string dir = args.out_dir;
    std::string corpus_path = dir + "/corpus.jsonl";
    io::atomic_write(corpus_path, [&](std::ostream& out) {
        for (const auto& rec : bundle.records) out << corpus::record_to_json_line(rec) << '\n';
    });
    graph::write_citers_jsonl(dir + "/citers.jsonl", bundle.citers);
    embeddings::write_vectors_jsonl(dir + "/vectors.jsonl", bundle.vectors);
    synth::write_truth_json(dir + "/truth.json", bundle.truth);
    if (!bundle.truth.queries.empty()) {
        retrieval::write_queries_jsonl(dir + "/queries.jsonl", bundle.truth.queries);
        embeddings::write_vectors_jsonl(dir + "/query_vectors.jsonl", bundle.query_vectors);
    }
    manifest.output(corpus_path);
    manifest.output(dir + "/citers.jsonl");
    manifest.output(dir + "/vectors.jsonl");
    manifest.output(dir + "/truth.json");
    manifest.write();
    log("synth: " + std::to_string(bundle.records.size()) + " records, " +
        std::to_string(bundle.citers.size()) + " citers -> " + dir);
    return 0;
}

struct IngestArgs {
    std::string input, output = "store.jsonl", sidecar;
    corpus::FilterParams filter;
    bool no_filter = false;
    size_t sample_per_domain = 0;
    std::string sample_out;
    uint64_t seed = 1;
};

int cmd_ingest(const IngestArgs& args) {
    Manifest manifest("ingest");
    manifest.input(args.input);
    manifest.set("min_abstract_chars", args.filter.min_abstract_chars);
    manifest.set("min_year", args.filter.min_year);
    manifest.set("no_filter", args.no_filter ? "true" : "false");
    manifest.set("sample_per_domain", static_cast<uint64_t>(args.sample_per_domain));
    manifest.set("seed", args.seed);

    corpus::ParsedStream parsed = corpus::read_corpus_jsonl(args.input);
    corpus::IngestResult result = corpus::ingest(std::move(parsed.records));
    for (auto& rej : parsed.rejections) result.rejections.push_back(std::move(rej));
    log("ingest: " + std::to_string(result.n_input) + " parsed, " +
        std::to_string(result.store.size()) + " unique, " +
        std::to_string(result.dedup_of.size()) + " merged, " +
        std::to_string(result.rejections.size()) + " rejected");

    const corpus::CorpusStore* final_store = &result.store;
    corpus::FilterResult filtered;
    if (!args.no_filter) {
        filtered = corpus::filter_eligibility(result.store, args.filter);
        log("filter: kept " + std::to_string(filtered.report.kept) + ", removed " +
            std::to_string(filtered.report.removed) + " (abstract " +
            std::to_string(filtered.report.failed_abstract) + ", year " +
            std::to_string(filtered.report.failed_year) + ", type " +
            std::to_string(filtered.report.failed_type) + ", boilerplate " +
            std::to_string(filtered.report.failed_boilerplate) + ")");
        final_store = &filtered.store;
    }
    corpus::write_corpus_jsonl(args.output, *final_store);
    manifest.output(args.output);
    std::string sidecar = args.sidecar.empty() ? args.output + ".dedup.jsonl" : args.sidecar;
    corpus::write_dedup_sidecar(sidecar, result);
    manifest.output(sidecar);

    if (args.sample_per_domain > 0) {
        std::vector<std::string> sample =
            corpus::stratified_sample(*final_store, args.sample_per_domain, args.seed);
        std::string sample_path =
            args.sample_out.empty() ? args.output + ".sample.txt" : args.sample_out;
        io::atomic_write(sample_path, [&](std::ostream& out) {
            for (const auto& id : sample) out << id << '\n';
        });
        manifest.output(sample_path);
        log("sample: " + std::to_string(sample.size()) + " ids -> " + sample_path);
    }
    manifest.write();
    return 0;
}

struct BuildGraphArgs {
    std::string store, citers, output = "edges.csv", orphans_out, members;
    graph::BcParams bc;
    graph::CcParams cc;
    int workers = 1;
};

int cmd_build_graph(const BuildGraphArgs& args) {
    Manifest manifest("build-graph");
    manifest.input(args.store);
    manifest.set("min_shared", static_cast<uint64_t>(args.bc.min_shared));
    manifest.set("hot_ref_cap", static_cast<uint64_t>(args.bc.hot_ref_cap));
    manifest.set("min_cociters", static_cast<uint64_t>(args.cc.min_cociters));
    manifest.set("citer_cap", static_cast<uint64_t>(args.cc.citer_cap));

    corpus::CorpusStore store = load_store(args.store);
    std::vector<std::string> member_ids;
    if (!args.members.empty()) {
        manifest.input(args.members);
        io::for_each_line(args.members,
                          [&](size_t, std::string_view line) { member_ids.emplace_back(line); });
    } else {
        member_ids = store.ids();
    }
    IdInterner members(std::move(member_ids));

    graph::BcParams bc = args.bc;
    bc.workers = args.workers;
    graph::CcParams cc = args.cc;
    cc.workers = args.workers;

    graph::DirectResult direct = graph::build_direct_edges(store, members);
    log("direct layer: " + std::to_string(direct.layer.edges.size()) + " edges");
    graph::BcResult bcr = graph::build_bc_edges(store, members, bc);
    log("bc layer: " + std::to_string(bcr.layer.edges.size()) + " edges (" +
        std::to_string(bcr.hot_refs_excluded) + " hot refs excluded)");
    graph::EdgeLayer cc_layer;
    cc_layer.kind = graph::LayerKind::cc;
    if (!args.citers.empty()) {
        manifest.input(args.citers);
        std::vector<graph::CiterRow> rows = graph::read_citers_jsonl(args.citers);
        graph::CcResult ccr = graph::build_cc_edges(rows, members, cc);
        log("cc layer: " + std::to_string(ccr.layer.edges.size()) + " edges (" +
            std::to_string(ccr.citers_excluded) + " citers excluded)");
        cc_layer = std::move(ccr.layer);
    }
    graph::AugmentedGraph merged =
        graph::merge_layers(direct.layer, bcr.layer, cc_layer, std::move(members));
    graph::OrphanResult pruned = graph::remove_orphans(std::move(merged));
    log("merged: " + std::to_string(pruned.graph.n_edges()) + " edges over " +
        std::to_string(pruned.graph.n_nodes()) + " nodes, " +
        std::to_string(pruned.orphans.size()) + " orphans");

    graph::write_edges_csv(args.output, pruned.graph);
    manifest.output(args.output);
    std::string orphans_path =
        args.orphans_out.empty() ? args.output + ".orphans.txt" : args.orphans_out;
    io::atomic_write(orphans_path, [&](std::ostream& out) {
        for (const auto& id : pruned.orphans) out << id << '\n';
    });
    manifest.output(orphans_path);
    manifest.write();
    return 0;
}

struct PartitionArgs {
    std::string edges, output = "partition.tsv", stats_out;
    double gamma_l1 = 1e-4, gamma_l2 = 1e-2;
    uint32_t split_min = 200;
    uint64_t seed = 1;
    int max_passes = 10;
    int workers = 1;
};

int cmd_partition(const PartitionArgs& args) {
    Manifest manifest("partition");
    manifest.input(args.edges);
    manifest.set("gamma_l1", args.gamma_l1);
    manifest.set("gamma_l2", args.gamma_l2);
    manifest.set("split_min", static_cast<uint64_t>(args.split_min));
    manifest.set("seed", args.seed);
    manifest.set("max_passes", args.max_passes);

    graph::AugmentedGraph g = graph::read_edges_csv(args.edges);
    log("graph: " + std::to_string(g.n_nodes()) + " nodes, " + std::to_string(g.n_edges()) +
        " edges");
    community::Partition l1 = community::leiden_cpm(g, args.gamma_l1, args.seed, args.max_passes);
    log("L1: " + std::to_string(l1.n_communities) + " communities");
    community::HierarchicalConfig hc;
    hc.gamma_l2 = args.gamma_l2;
    hc.seed = args.seed;
    hc.min_split_size = args.split_min;
    hc.max_passes = args.max_passes;
    hc.workers = args.workers;
    community::Partition l2 = community::hierarchical_l2(g, l1, hc);
    log("L2: " + std::to_string(l2.n_communities) + " communities");

    community::write_partition_tsv(args.output, l1, l2);
    manifest.output(args.output);
    std::string stats_path = args.stats_out.empty() ? args.output + ".stats.json" : args.stats_out;
    std::vector<community::PartitionStats> stats;
    stats.push_back(community::partition_stats(l1, community::cpm_quality(g, l1, args.gamma_l1)));
    stats.push_back(community::partition_stats(l2, community::cpm_quality(g, l2, args.gamma_l2)));
    community::write_stats_json(stats_path, stats);
    manifest.output(stats_path);
    manifest.write();
    return 0;
}

struct SweepArgs {
    std::string edges, output = "sweep_stats.json";
    std::vector<double> gammas;
    uint64_t seed = 1;
    int max_passes = 10;
};

int cmd_sweep(const SweepArgs& args) {
    Manifest manifest("sweep");
    manifest.input(args.edges);
    std::string gamma_list;
    for (double g : args.gammas) gamma_list += io::format_double(g) + " ";
    manifest.set("gammas", gamma_list);
    manifest.set("seed", args.seed);

    graph::AugmentedGraph g = graph::read_edges_csv(args.edges);
    std::vector<community::PartitionStats> stats =
        community::resolution_sweep(g, args.gammas, args.seed, args.max_passes);
    for (const auto& s : stats)
        log("gamma " + io::format_double(s.gamma) + ": " + std::to_string(s.n_communities) +
            " communities, max share " + io::format_9sig(s.max_share));
    community::write_stats_json(args.output, stats);
    manifest.output(args.output);
    manifest.write();
    return 0;
}

struct KnnArgs {
    std::string vectors, store, partition, output = "neighbors.jsonl";
    uint32_t k = 100;
    size_t pool_cap = 0;
    std::string domain;
    uint64_t seed = 1;
    int workers = 1;
    bool no_normalize = false;
};

int cmd_knn(const KnnArgs& args) {
    Manifest manifest("knn");
    manifest.input(args.vectors);
    manifest.input(args.store);
    manifest.set("k", static_cast<uint64_t>(args.k));
    manifest.set("pool_cap", static_cast<uint64_t>(args.pool_cap));
    manifest.set("seed", args.seed);

    embeddings::EmbeddingSet set = embeddings::load_vectors(args.vectors);
    if (!args.no_normalize) set = set.normalized();
    corpus::CorpusStore store = load_store(args.store);

    // Pools follow the paper's order of operations: orphans leave the graph
    // before any pool is drawn, so a partition restricts pools to labeled
    // papers.
    const community::Partition* labeled = nullptr;
    community::Partition l1_part;
    if (!args.partition.empty()) {
        manifest.input(args.partition);
        auto [l1, l2] = community::read_partition_tsv(args.partition);
        l1_part = std::move(l1);
        labeled = &l1_part;
    }

    std::map<std::string, std::vector<std::string>> pools;
    size_t missing = 0, unlabeled = 0;
    for (const auto& rec : store.records()) {
        if (!args.domain.empty() && rec.domain != args.domain) continue;
        if (!set.contains(rec.paper_id)) {
            ++missing;
            continue;
        }
        if (labeled && labeled->find_label(rec.paper_id) < 0) {
            ++unlabeled;
            continue;
        }
        pools[rec.domain].push_back(rec.paper_id);
    }
    if (missing) log("knn: " + std::to_string(missing) + " store ids have no vector");
    if (unlabeled) log("knn: " + std::to_string(unlabeled) + " store ids have no community label");
    if (pools.empty()) throw InputError("knn: no pool papers with vectors");

    io::atomic_write(args.output, [&](std::ostream& out) {
        for (auto& [domain, pool] : pools) {
            if (args.pool_cap > 0 && pool.size() > args.pool_cap) {
                Rng rng(derive_seed(args.seed, "pool", fnv1a64(domain)));
                rng.shuffle(pool);
                pool.resize(args.pool_cap);
                std::sort(pool.begin(), pool.end());
            }
            if (pool.size() <= args.k)
                throw InputError("knn: domain '" + domain + "' pool (" +
                                 std::to_string(pool.size()) + ") not larger than k");
            embeddings::NeighborTable table = embeddings::topk_neighbors(set, pool, args.k,
                                                                         args.workers);
            log("knn: domain " + domain + ", pool " + std::to_string(pool.size()));
            for (size_t q = 0; q < table.pool_ids.size(); ++q) {
                out << "{\"query_id\":" << nlohmann::json(table.pool_ids[q]).dump()
                    << ",\"neighbors\":[";
                const embeddings::Neighbor* row = table.row(q);
                for (uint32_t i = 0; i < table.k_max; ++i) {
                    if (i) out << ',';
                    out << "{\"id\":" << nlohmann::json(table.neighbor_id(row[i])).dump()
                        << ",\"cos\":" << io::format_double(row[i].cosine) << '}';
                }
                out << "]}\n";
            }
        }
    });
    manifest.output(args.output);
    manifest.write();
    return 0;
}

struct ConcordanceArgs {
    std::string neighbors, partition, store, output = "concordance.json";
    std::string csv_out, lexdist_out;
    std::string model = "model";
    std::vector<uint32_t> ks = {2, 5, 10, 25, 50, 100};
};

int cmd_concordance(const ConcordanceArgs& args) {
    Manifest manifest("concordance");
    manifest.input(args.neighbors);
    manifest.input(args.partition);
    manifest.set("model", args.model);

    embeddings::NeighborTable table = embeddings::read_neighbors_jsonl(args.neighbors);
    auto [l1, l2] = community::read_partition_tsv(args.partition);

    std::vector<uint32_t> ks;
    for (uint32_t k : args.ks) {
        if (k <= table.k_max)
            ks.push_back(k);
        else
            log("concordance: dropping k=" + std::to_string(k) + " beyond table k_max " +
                std::to_string(table.k_max));
    }
    if (ks.empty()) throw InputError("concordance: no usable k values");

    // Per-domain splits when a store is given; one "all" block otherwise.
    std::map<std::string, std::vector<std::string>> domains;
    if (!args.store.empty()) {
        manifest.input(args.store);
        corpus::CorpusStore store = load_store(args.store);
        std::unordered_set<std::string> in_table(table.pool_ids.begin(), table.pool_ids.end());
        for (const auto& rec : store.records())
            if (in_table.count(rec.paper_id)) domains[rec.domain].push_back(rec.paper_id);
    }

    std::vector<concordance::ConcordanceReport> reports;
    reports.push_back(concordance::make_report(args.model, "all", "L1", table, l1, ks));
    reports.push_back(concordance::make_report(args.model, "all", "L2", table, l2, ks));
    for (const auto& [domain, ids] : domains) {
        embeddings::NeighborTable sub = subset_table(table, ids);
        reports.push_back(concordance::make_report(args.model, domain, "L1", sub, l1, ks));
        reports.push_back(concordance::make_report(args.model, domain, "L2", sub, l2, ks));
    }
    concordance::write_reports_json(args.output, reports);
    manifest.output(args.output);
    if (!args.csv_out.empty()) {
        concordance::write_reports_csv(args.csv_out, reports);
        manifest.output(args.csv_out);
    }
    if (!args.lexdist_out.empty()) {
        if (args.store.empty())
            throw InputError("--lexdist-out needs --store for the document text");
        corpus::CorpusStore store = load_store(args.store);
        concordance::LexicalResult lex = concordance::lexical_distinctiveness(store, l1, l2);
        io::atomic_write(args.lexdist_out, [&](std::ostream& out) {
            ordered_json j;
            ordered_json by_domain = ordered_json::object();
            for (const auto& [domain, frac] : lex.by_domain) {
                ordered_json entry;
                entry["distinct_fraction"] = frac;
                entry["n_parents"] = lex.parents_by_domain.at(domain);
                by_domain[domain] = entry;
            }
            j["by_domain"] = by_domain;
            j["skipped_single_child"] = lex.skipped_single_child;
            out << j.dump(2) << '\n';
        });
        manifest.output(args.lexdist_out);
    }
    manifest.write();
    return 0;
}

struct RetrieveArgs {
    std::string queries, store, vectors, query_vectors, partition;
    std::string retriever = "bm25";
    std::string output = "runs.jsonl";
    size_t top_n = 10;
    size_t candidate_pool = 1000;
    double judge_threshold = 0.8;
    std::vector<std::string> fuse;
    int rrf_k0 = 60;
};

retrieval::RetrievalRun run_bm25cite(const retrieval::Bm25Index& bm25,
                                     const retrieval::CitationIndex& cites,
                                     const retrieval::AgendaQuery& q, size_t candidate_pool,
                                     size_t top_n) {
    retrieval::RetrievalRun candidates = bm25.search(q.description, candidate_pool, q.domain);
    retrieval::RetrievalRun run;
    run.query_id = q.query_id;
    run.retriever = "bm25cite";
    if (candidates.ranked.empty()) return run;
    std::vector<std::string> ids;
    ids.reserve(candidates.ranked.size());
    for (const auto& d : candidates.ranked) ids.push_back(d.id);
    retrieval::RetrievalRun reranked = retrieval::internal_citation_rerank(ids, cites);
    run.ranked.assign(reranked.ranked.begin(),
                      reranked.ranked.begin() +
                          std::min(top_n, reranked.ranked.size()));
    return run;
}

int cmd_retrieve(const RetrieveArgs& args) {
    Manifest manifest("retrieve");
    manifest.set("retriever", args.retriever);
    manifest.set("top_n", static_cast<uint64_t>(args.top_n));

    if (!args.fuse.empty()) {
        // Fuse previously written run files, matching runs by query id.
        std::map<std::string, std::vector<retrieval::RetrievalRun>> by_query;
        for (const auto& path : args.fuse) {
            manifest.input(path);
            for (auto& run : retrieval::read_runs_jsonl(path))
                by_query[run.query_id].push_back(std::move(run));
        }
        std::vector<retrieval::RetrievalRun> fused;
        for (auto& [qid, runs] : by_query) {
            retrieval::RetrievalRun f = retrieval::rrf_fuse(runs, args.rrf_k0, args.top_n);
            f.query_id = qid;
            f.retriever = "rrf";
            fused.push_back(std::move(f));
        }
        retrieval::write_runs_jsonl(args.output, fused);
        manifest.output(args.output);
        manifest.write();
        return 0;
    }

    manifest.input(args.queries);
    manifest.input(args.store);
    std::vector<retrieval::AgendaQuery> queries = retrieval::read_queries_jsonl(args.queries);
    corpus::CorpusStore store = load_store(args.store);
    std::vector<retrieval::RetrievalRun> runs;

    if (args.retriever == "bm25") {
        retrieval::Bm25Index bm25 = retrieval::bm25_index(store);
        for (const auto& q : queries) {
            retrieval::RetrievalRun run = bm25.search(q.description, args.top_n, q.domain);
            run.query_id = q.query_id;
            runs.push_back(std::move(run));
        }
    } else if (args.retriever == "bm25cite") {
        retrieval::Bm25Index bm25 = retrieval::bm25_index(store);
        retrieval::CitationIndex cites =
            retrieval::CitationIndex::build(store, IdInterner(store.ids()));
        for (const auto& q : queries)
            runs.push_back(run_bm25cite(bm25, cites, q, args.candidate_pool, args.top_n));
    } else if (args.retriever == "cosine") {
        if (args.vectors.empty() || args.query_vectors.empty())
            throw InputError("cosine retriever needs --vectors and --query-vectors");
        manifest.input(args.vectors);
        manifest.input(args.query_vectors);
        embeddings::EmbeddingSet set = embeddings::load_vectors(args.vectors).normalized();
        embeddings::EmbeddingSet qset =
            embeddings::load_vectors(args.query_vectors).normalized();
        std::vector<std::string> pool;
        for (const auto& rec : store.records())
            if (set.contains(rec.paper_id)) pool.push_back(rec.paper_id);
        for (const auto& q : queries) {
            const float* qv = qset.vector_of(q.query_id);
            std::vector<float> qvec(qv, qv + qset.dim());
            retrieval::RetrievalRun run = retrieval::cosine_search(set, qvec, pool, args.top_n);
            run.query_id = q.query_id;
            runs.push_back(std::move(run));
        }
    } else if (args.retriever == "graph") {
        retrieval::Bm25Index bm25 = retrieval::bm25_index(store);
        retrieval::CitationIndex cites =
            retrieval::CitationIndex::build(store, IdInterner(store.ids()));
        retrieval::StubStrategist strategist;
        retrieval::StubJudge judge;
        retrieval::GraphRetrieveParams params;
        params.threshold = args.judge_threshold;
        params.candidate_cut = args.candidate_pool;
        std::vector<std::string> pool = store.ids();
        for (const auto& q : queries) {
            retrieval::GraphRetrieveResult res = retrieval::graph_retrieve(
                q, strategist, judge, bm25.text_index(), cites, store, pool, params);
            if (res.status == retrieval::GraphRetrieveStatus::no_passing_candidate)
                log("graph: no passing candidate for " + q.query_id);
            retrieval::RetrievalRun run = std::move(res.run);
            run.query_id = q.query_id;
            run.retriever = "graph";
            if (run.ranked.size() > args.top_n) run.ranked.resize(args.top_n);
            runs.push_back(std::move(run));
        }
    } else {
        throw CLI::ValidationError("--retriever", "unknown retriever: " + args.retriever);
    }
    retrieval::write_runs_jsonl(args.output, runs);
    manifest.output(args.output);
    manifest.write();
    return 0;
}

struct BenchArgs {
    std::string queries, store, partition, vectors, query_vectors;
    std::string output = "bench.csv", runs_out;
    size_t top_n = 10;
    size_t candidate_pool = 1000;
    int rrf_k0 = 60;
    size_t rrf_depth = 100;
};

int cmd_bench(const BenchArgs& args) {
    Manifest manifest("bench");
    manifest.input(args.queries);
    manifest.input(args.store);
    manifest.input(args.partition);
    manifest.set("top_n", static_cast<uint64_t>(args.top_n));
    manifest.set("candidate_pool", static_cast<uint64_t>(args.candidate_pool));
    manifest.set("rrf_k0", args.rrf_k0);
    manifest.set("rrf_depth", static_cast<uint64_t>(args.rrf_depth));

    std::vector<retrieval::AgendaQuery> queries = retrieval::read_queries_jsonl(args.queries);
    corpus::CorpusStore store = load_store(args.store);
    auto [l1, l2] = community::read_partition_tsv(args.partition);
    retrieval::Bm25Index bm25 = retrieval::bm25_index(store);
    retrieval::CitationIndex cites =
        retrieval::CitationIndex::build(store, IdInterner(store.ids()));

    bool with_cosine = !args.vectors.empty() && !args.query_vectors.empty();
    embeddings::EmbeddingSet set, qset;
    std::vector<std::string> cosine_pool;
    if (with_cosine) {
        manifest.input(args.vectors);
        manifest.input(args.query_vectors);
        set = embeddings::load_vectors(args.vectors).normalized();
        qset = embeddings::load_vectors(args.query_vectors).normalized();
        for (const auto& rec : store.records())
            if (set.contains(rec.paper_id)) cosine_pool.push_back(rec.paper_id);
    }
    // The labeled universe stands in for the standardized pool.
    std::vector<std::string> labeled_pool = l2.ids;

    retrieval::StubStrategist strategist;
    retrieval::StubJudge judge;
    retrieval::GraphRetrieveParams gparams;
    gparams.candidate_cut = args.candidate_pool;

    struct Tally {
        size_t hits = 0, n = 0, empty = 0;
    };
    std::map<std::pair<std::string, std::string>, Tally> tally;  // (retriever, domain)
    std::vector<retrieval::RetrievalRun> all_runs;

    auto record = [&](const retrieval::RetrievalRun& run, const retrieval::AgendaQuery& q) {
        retrieval::Top1Outcome outcome = retrieval::eval_top1_l2(run, q, l2);
        for (const std::string& domain : {q.domain, std::string("all")}) {
            Tally& t = tally[{run.retriever, domain}];
            ++t.n;
            if (outcome == retrieval::Top1Outcome::hit) ++t.hits;
            if (outcome == retrieval::Top1Outcome::empty_run) ++t.empty;
        }
        all_runs.push_back(run);
    };

    for (const auto& q : queries) {
        retrieval::RetrievalRun bm25_run = bm25.search(q.description, args.rrf_depth, q.domain);
        bm25_run.query_id = q.query_id;
        retrieval::RetrievalRun bm25_top = bm25_run;
        bm25_top.retriever = "bm25";
        if (bm25_top.ranked.size() > args.top_n) bm25_top.ranked.resize(args.top_n);
        record(bm25_top, q);

        retrieval::RetrievalRun cite_run =
            run_bm25cite(bm25, cites, q, args.candidate_pool, args.rrf_depth);
        retrieval::RetrievalRun cite_top = cite_run;
        cite_top.retriever = "bm25cite";
        if (cite_top.ranked.size() > args.top_n) cite_top.ranked.resize(args.top_n);
        record(cite_top, q);

        retrieval::GraphRetrieveResult graph_res = retrieval::graph_retrieve(
            q, strategist, judge, bm25.text_index(), cites, store, labeled_pool, gparams);
        retrieval::RetrievalRun graph_run = std::move(graph_res.run);
        graph_run.query_id = q.query_id;
        graph_run.retriever = "graph";
        if (graph_run.ranked.size() > args.top_n) graph_run.ranked.resize(args.top_n);
        record(graph_run, q);

        if (with_cosine) {
            const float* qv = qset.vector_of(q.query_id);
            std::vector<float> qvec(qv, qv + qset.dim());
            retrieval::RetrievalRun cos_run =
                retrieval::cosine_search(set, qvec, cosine_pool, args.rrf_depth);
            cos_run.query_id = q.query_id;
            retrieval::RetrievalRun cos_top = cos_run;
            cos_top.retriever = "cosine:" + set.model_name();
            if (cos_top.ranked.size() > args.top_n) cos_top.ranked.resize(args.top_n);
            record(cos_top, q);

            retrieval::RetrievalRun rrf2 =
                retrieval::rrf_fuse({bm25_run, cos_run}, args.rrf_k0, args.top_n);
            rrf2.query_id = q.query_id;
            rrf2.retriever = "rrf:bm25+cos";
            record(rrf2, q);

            retrieval::RetrievalRun rrf3 =
                retrieval::rrf_fuse({bm25_run, cos_run, cite_run}, args.rrf_k0, args.top_n);
            rrf3.query_id = q.query_id;
            rrf3.retriever = "rrf:bm25+cos+cite";
            record(rrf3, q);
        }
    }

    std::vector<retrieval::BenchRow> rows;
    for (const auto& [key, t] : tally) {
        retrieval::BenchRow row;
        row.retriever = key.first;
        row.domain = key.second;
        row.n_queries = t.n;
        row.n_empty = t.empty;
        row.top1_l2_rate = t.n ? static_cast<double>(t.hits) / static_cast<double>(t.n) : 0.0;
        rows.push_back(std::move(row));
    }
    retrieval::write_bench_csv(args.output, rows);
    manifest.output(args.output);
    if (!args.runs_out.empty()) {
        retrieval::write_runs_jsonl(args.runs_out, all_runs);
        manifest.output(args.runs_out);
    }
    manifest.write();
    log("bench: " + std::to_string(queries.size()) + " queries, " + std::to_string(rows.size()) +
        " report rows -> " + args.output);
    return 0;
}

struct ReportArgs {
    std::vector<std::string> concordance_files;
    std::string bench;
    std::string out_dir = "report";
};

int cmd_report(const ReportArgs& args) {
    Manifest manifest("report");
    std::vector<concordance::ConcordanceReport> reports;
    for (const auto& path : args.concordance_files) {
        manifest.input(path);
        for (auto& r : concordance::read_reports_json(path)) reports.push_back(std::move(r));
    }

    // Figure 1 analogue: top-10 cumulative same-rate per (model, domain, level).
    std::string fig1 = args.out_dir + "/fig1_hierarchical.csv";
    io::atomic_write(fig1, [&](std::ostream& out) {
        out << "model,domain,level,top10_rate,baseline,enrichment\n";
        for (const auto& r : reports) {
            auto it = r.cumulative_topk.find(10);
            if (it == r.cumulative_topk.end() || r.domain == "all") continue;
            out << r.model_name << ',' << r.domain << ',' << r.level << ','
                << io::format_9sig(it->second) << ',' << io::format_9sig(r.baseline) << ','
                << io::format_9sig(r.enrichment_cumulative.at(10)) << '\n';
        }
    });
    manifest.output(fig1);

    // Figure 2 analogue: rank sweep, domain mean and stddev per (model, level, k).
    std::string fig2 = args.out_dir + "/fig2_rank_sweep.csv";
    io::atomic_write(fig2, [&](std::ostream& out) {
        out << "model,level,k,mean_rate,std_rate,n_domains\n";
        std::map<std::tuple<std::string, std::string, uint32_t>, std::vector<double>> cells;
        for (const auto& r : reports) {
            if (r.domain == "all") continue;
            for (const auto& [k, rate] : r.cumulative_topk)
                cells[{r.model_name, r.level, k}].push_back(rate);
        }
        for (const auto& [key, rates] : cells) {
            double mean = 0;
            for (double x : rates) mean += x;
            mean /= static_cast<double>(rates.size());
            double var = 0;
            for (double x : rates) var += (x - mean) * (x - mean);
            var = rates.size() > 1 ? var / static_cast<double>(rates.size() - 1) : 0.0;
            out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
                << io::format_9sig(mean) << ',' << io::format_9sig(std::sqrt(var)) << ','
                << rates.size() << '\n';
        }
    });
    manifest.output(fig2);

    // Figure 3 analogue: per-domain L1 -> L2 drop at k=10, mean over models.
    std::string fig3 = args.out_dir + "/fig3_l1_l2_drop.csv";
    io::atomic_write(fig3, [&](std::ostream& out) {
        out << "domain,l1_rate,l2_rate,drop\n";
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> cells;
        for (const auto& r : reports) {
            if (r.domain == "all") continue;
            auto it = r.cumulative_topk.find(10);
            if (it == r.cumulative_topk.end()) continue;
            if (r.level == "L1")
                cells[r.domain].first.push_back(it->second);
            else
                cells[r.domain].second.push_back(it->second);
        }
        for (const auto& [domain, pair] : cells) {
            auto mean = [](const std::vector<double>& v) {
                double m = 0;
                for (double x : v) m += x;
                return v.empty() ? 0.0 : m / static_cast<double>(v.size());
            };
            double l1m = mean(pair.first), l2m = mean(pair.second);
            out << domain << ',' << io::format_9sig(l1m) << ',' << io::format_9sig(l2m) << ','
                << io::format_9sig(l1m - l2m) << '\n';
        }
    });
    manifest.output(fig3);

    if (!args.bench.empty()) {
        manifest.input(args.bench);
        std::string fig4 = args.out_dir + "/fig4_retrieval.csv";
        std::string bench_content = io::read_file(args.bench);
        io::atomic_write(fig4, [&](std::ostream& out) { out << bench_content; });
        manifest.output(fig4);
    }
    manifest.write();
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"citegraph: augmented citation graphs, two-level Leiden CPM communities,\n"
                 "embedding-neighbor concordance and citation-rerank retrieval probes"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file; sections per subcommand; flags win");
    app.set_version_flag("--version", kVersion);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a planted two-level corpus");
    synth_cmd->add_option("--out-dir", synth_args.out_dir, "Output directory");
    synth_cmd->add_option("--seed", synth_args.spec.seed, "Generator seed");
    synth_cmd->add_option("--n-l1", synth_args.spec.n_l1, "Number of L1 blocks");
    synth_cmd->add_option("--l2-per-l1", synth_args.spec.l2_per_l1, "L2 blocks per L1");
    synth_cmd->add_option("--papers-per-l2", synth_args.spec.papers_per_l2, "Papers per L2");
    synth_cmd->add_option("--n-domains", synth_args.spec.n_domains, "Domains (L1s cycle)");
    synth_cmd->add_option("--p-ref-l2", synth_args.spec.p_ref_in_l2, "P(ref from own L2 pool)");
    synth_cmd->add_option("--p-ref-l1", synth_args.spec.p_ref_in_l1, "P(ref from own L1 pool)");
    synth_cmd->add_option("--p-ref-cross", synth_args.spec.p_ref_cross, "P(ref from global pool)");
    synth_cmd->add_option("--p-cite-l2", synth_args.spec.cite.p_cite_in_l2,
                          "P(cite earlier same-L2 member)");
    synth_cmd->add_option("--p-cite-l1", synth_args.spec.cite.p_cite_in_l1,
                          "P(cite earlier same-L1 member)");
    synth_cmd->add_option("--p-cite-canonical", synth_args.spec.cite.p_cite_canonical,
                          "Extra citation mass on canonical papers");
    synth_cmd->add_option("--citers-per-l2", synth_args.spec.citer.citers_per_l2,
                          "External citers per L2");
    synth_cmd->add_option("--p-citer-member", synth_args.spec.citer.p_cite_member,
                          "P(citer cites an L2 member)");
    synth_cmd->add_option("--dim", synth_args.spec.embedding.dim, "Toy embedding dimension");
    synth_cmd->add_option("--l2-scale", synth_args.spec.embedding.l2_scale,
                          "L2 offset scale in toy embeddings");
    synth_cmd->add_option("--noise-sigma", synth_args.spec.embedding.noise_sigma,
                          "Gaussian noise sigma in toy embeddings");
    synth_cmd->add_option("--query-noise-sigma", synth_args.spec.embedding.query_noise_sigma,
                          "Gaussian noise sigma on planted query vectors");
    synth_cmd->add_option("--p-agenda-text", synth_args.spec.text.p_agenda_in_text,
                          "P(agenda token appears in text)");
    synth_cmd->add_option("--p-agenda-leak", synth_args.spec.text.p_agenda_leak,
                          "P(sibling agenda token leaks into text)");
    synth_cmd->add_flag("--no-query-topic", [&](int64_t) {
        synth_args.spec.text.query_topic_tokens = false;
    }, "Leave topic tokens out of query descriptions");
    synth_cmd->add_option("--duplicates", synth_args.spec.planted_duplicates,
                          "Planted duplicate twins");
    synth_cmd->add_option("--orphan-frac", synth_args.spec.orphan_frac,
                          "Fraction of papers with no graph ties");
    synth_cmd->add_option("--queries", synth_args.n_queries, "Planted agenda queries");

    IngestArgs ingest_args;
    auto* ingest_cmd =
        app.add_subcommand("ingest", "Deduplicate, merge, filter and sample paper metadata");
    ingest_cmd->add_option("--input", ingest_args.input, "JSONL paper records")->required();
    ingest_cmd->add_option("--output", ingest_args.output, "Canonical store JSONL");
    ingest_cmd->add_option("--sidecar", ingest_args.sidecar, "Dedup/rejection sidecar JSONL");
    ingest_cmd->add_option("--min-abstract-chars", ingest_args.filter.min_abstract_chars,
                           "Eligibility: minimum abstract length");
    ingest_cmd->add_option("--min-year", ingest_args.filter.min_year,
                           "Eligibility: minimum publication year");
    ingest_cmd->add_option("--allowed-types", ingest_args.filter.allowed_types,
                           "Keep only these article types (typed records)");
    ingest_cmd->add_option("--boilerplate", ingest_args.filter.boilerplate_patterns,
                           "Boilerplate abstract regexes");
    ingest_cmd->add_flag("--no-filter", ingest_args.no_filter, "Skip eligibility filtering");
    ingest_cmd->add_option("--sample-per-domain", ingest_args.sample_per_domain,
                           "Stratified sample size per domain (0 = off)");
    ingest_cmd->add_option("--sample-out", ingest_args.sample_out, "Sample id list path");
    ingest_cmd->add_option("--seed", ingest_args.seed, "Sampling seed");

    BuildGraphArgs graph_args;
    auto* graph_cmd = app.add_subcommand("build-graph", "Build the augmented citation graph");
    graph_cmd->add_option("--store", graph_args.store, "Canonical store JSONL")->required();
    graph_cmd->add_option("--citers", graph_args.citers, "Citer table JSONL (for co-citation)");
    graph_cmd->add_option("--output", graph_args.output, "Edge CSV");
    graph_cmd->add_option("--orphans-out", graph_args.orphans_out, "Orphan id list");
    graph_cmd->add_option("--members", graph_args.members, "Member id list (default: all)");
    graph_cmd->add_option("--min-shared", graph_args.bc.min_shared, "BC: min shared references");
    graph_cmd->add_option("--hot-ref-cap", graph_args.bc.hot_ref_cap,
                          "BC: exclude refs cited by more members");
    graph_cmd->add_option("--min-cociters", graph_args.cc.min_cociters, "CC: min common citers");
    graph_cmd->add_option("--citer-cap", graph_args.cc.citer_cap,
                          "CC: exclude citers citing more members");
    graph_cmd->add_option("--workers", graph_args.workers, "Worker threads");

    PartitionArgs part_args;
    auto* part_cmd =
        app.add_subcommand("partition", "Leiden CPM at L1 and hierarchical L2");
    part_cmd->add_option("--edges", part_args.edges, "Edge CSV")->required();
    part_cmd->add_option("--output", part_args.output, "Partition TSV");
    part_cmd->add_option("--stats-out", part_args.stats_out, "Partition stats JSON");
    part_cmd->add_option("--gamma-l1", part_args.gamma_l1, "L1 resolution");
    part_cmd->add_option("--gamma-l2", part_args.gamma_l2, "L2 resolution");
    part_cmd->add_option("--split-min", part_args.split_min, "Min L1 size to split at L2");
    part_cmd->add_option("--seed", part_args.seed, "Leiden seed");
    part_cmd->add_option("--max-passes", part_args.max_passes, "Max Leiden passes");
    part_cmd->add_option("--workers", part_args.workers, "Worker threads for L2 jobs");

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "Resolution sweep with per-gamma stats");
    sweep_cmd->add_option("--edges", sweep_args.edges, "Edge CSV")->required();
    sweep_cmd->add_option("--gammas", sweep_args.gammas, "Gamma values, sorted ascending")
        ->required();
    sweep_cmd->add_option("--output", sweep_args.output, "Stats JSON");
    sweep_cmd->add_option("--seed", sweep_args.seed, "Leiden seed");
    sweep_cmd->add_option("--max-passes", sweep_args.max_passes, "Max Leiden passes");

    KnnArgs knn_args;
    auto* knn_cmd = app.add_subcommand("knn", "Exact top-k cosine neighbors per domain pool");
    knn_cmd->add_option("--vectors", knn_args.vectors, "Vector JSONL")->required();
    knn_cmd->add_option("--store", knn_args.store, "Canonical store JSONL (domains)")->required();
    knn_cmd->add_option("--partition", knn_args.partition,
                        "Partition TSV; restricts pools to labeled papers");
    knn_cmd->add_option("--output", knn_args.output, "Neighbor JSONL");
    knn_cmd->add_option("--k", knn_args.k, "Neighbors per query");
    knn_cmd->add_option("--pool-cap", knn_args.pool_cap, "Max pool size per domain (0 = all)");
    knn_cmd->add_option("--domain", knn_args.domain, "Restrict to one domain");
    knn_cmd->add_option("--seed", knn_args.seed, "Pool sampling seed");
    knn_cmd->add_option("--workers", knn_args.workers, "Worker threads");
    knn_cmd->add_flag("--no-normalize", knn_args.no_normalize, "Trust input norms");

    ConcordanceArgs conc_args;
    auto* conc_cmd =
        app.add_subcommand("concordance", "Same-community rates of embedding neighbors");
    conc_cmd->add_option("--neighbors", conc_args.neighbors, "Neighbor JSONL")->required();
    conc_cmd->add_option("--partition", conc_args.partition, "Partition TSV")->required();
    conc_cmd->add_option("--store", conc_args.store, "Store JSONL for per-domain splits");
    conc_cmd->add_option("--output", conc_args.output, "Report JSON");
    conc_cmd->add_option("--csv-out", conc_args.csv_out, "Plot-ready CSV");
    conc_cmd->add_option("--lexdist-out", conc_args.lexdist_out,
                         "Lexical distinctiveness JSON (needs --store)");
    conc_cmd->add_option("--model", conc_args.model, "Model name for the report");
    conc_cmd->add_option("--ks", conc_args.ks, "Neighbor ranks to report");

    RetrieveArgs retr_args;
    auto* retr_cmd = app.add_subcommand("retrieve", "Run one retriever over a query file");
    retr_cmd->add_option("--queries", retr_args.queries, "Agenda query JSONL");
    retr_cmd->add_option("--store", retr_args.store, "Canonical store JSONL");
    retr_cmd->add_option("--retriever", retr_args.retriever,
                         "bm25 | bm25cite | cosine | graph");
    retr_cmd->add_option("--vectors", retr_args.vectors, "Paper vectors (cosine)");
    retr_cmd->add_option("--query-vectors", retr_args.query_vectors, "Query vectors (cosine)");
    retr_cmd->add_option("--output", retr_args.output, "Run JSONL");
    retr_cmd->add_option("--top-n", retr_args.top_n, "Results per query");
    retr_cmd->add_option("--candidate-pool", retr_args.candidate_pool,
                         "Candidate list size before rerank");
    retr_cmd->add_option("--judge-threshold", retr_args.judge_threshold,
                         "Graph retriever pass threshold");
    retr_cmd->add_option("--fuse", retr_args.fuse, "RRF-fuse these run files instead");
    retr_cmd->add_option("--rrf-k0", retr_args.rrf_k0, "RRF constant");

    BenchArgs bench_args;
    auto* bench_cmd =
        app.add_subcommand("bench", "Run the retriever comparison and score top-1 L2");
    bench_cmd->add_option("--queries", bench_args.queries, "Agenda query JSONL")->required();
    bench_cmd->add_option("--store", bench_args.store, "Canonical store JSONL")->required();
    bench_cmd->add_option("--partition", bench_args.partition, "Partition TSV")->required();
    bench_cmd->add_option("--vectors", bench_args.vectors, "Paper vectors");
    bench_cmd->add_option("--query-vectors", bench_args.query_vectors, "Query vectors");
    bench_cmd->add_option("--output", bench_args.output, "Benchmark report CSV");
    bench_cmd->add_option("--runs-out", bench_args.runs_out, "All runs JSONL");
    bench_cmd->add_option("--top-n", bench_args.top_n, "Results per query");
    bench_cmd->add_option("--candidate-pool", bench_args.candidate_pool,
                          "Candidate list size before rerank");
    bench_cmd->add_option("--rrf-k0", bench_args.rrf_k0, "RRF constant");
    bench_cmd->add_option("--rrf-depth", bench_args.rrf_depth, "Run depth fed into RRF");

    ReportArgs report_args;
    auto* report_cmd = app.add_subcommand("report", "Join outputs into plot-ready CSVs");
    report_cmd->add_option("--concordance", report_args.concordance_files,
                           "Concordance report JSONs");
    report_cmd->add_option("--bench", report_args.bench, "Benchmark CSV");
    report_cmd->add_option("--out-dir", report_args.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth_cmd->parsed()) return cmd_synth(synth_args);
        if (ingest_cmd->parsed()) return cmd_ingest(ingest_args);
        if (graph_cmd->parsed()) return cmd_build_graph(graph_args);
        if (part_cmd->parsed()) return cmd_partition(part_args);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_args);
        if (knn_cmd->parsed()) return cmd_knn(knn_args);
        if (conc_cmd->parsed()) return cmd_concordance(conc_args);
        if (retr_cmd->parsed()) return cmd_retrieve(retr_args);
        if (bench_cmd->parsed()) return cmd_bench(bench_args);
        if (report_cmd->parsed()) return cmd_report(report_args);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const boolquery::ParseError& e) {
        std::cerr << "query parse error: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace citegraph::cli
