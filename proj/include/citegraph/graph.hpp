#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "citegraph/common/ids.hpp"
#include "citegraph/corpus.hpp"

namespace citegraph::graph {

enum class LayerKind { direct, bc, cc };

struct LayerEdge {
    uint32_t a, b;  // member indexes, a < b
    double w;
};

// One edge source. Edges are canonically oriented (a < b on the interned
// member order, i.e. lexicographic paper-id order) and sorted by (a, b).
struct EdgeLayer {
    LayerKind kind = LayerKind::direct;
    std::vector<LayerEdge> edges;
};

struct MergedEdge {
    uint32_t a, b;
    double w_total, w_direct, w_bc, w_cc;
};

struct AugmentedGraph {
    IdInterner members;             // the full member universe
    std::vector<MergedEdge> edges;  // sorted by (a, b)
    std::vector<uint32_t> nodes;    // member indexes with degree >= 1, sorted

    size_t n_nodes() const { return nodes.size(); }
    size_t n_edges() const { return edges.size(); }
};

// |A∩B| / sqrt(|A|·|B|). Throws std::invalid_argument on zero-sized sets
// or inconsistent counts.
double salton_cosine(size_t shared, size_t size_a, size_t size_b);

struct DirectResult {
    EdgeLayer layer;
    size_t self_citations_ignored = 0;
};

// Undirected target-target citation edges, weight 1.0; mutual citations
// collapse to one edge.
DirectResult build_direct_edges(const corpus::CorpusStore& store, const IdInterner& members);

struct BcParams {
    size_t min_shared = 3;
    size_t hot_ref_cap = 500;  // refs cited by more members are excluded
    int workers = 1;
};

struct BcResult {
    EdgeLayer layer;
    size_t papers_without_references = 0;
    size_t hot_refs_excluded = 0;
};

// Bibliographic coupling via an inverted reference->citers join. Hot
// references are excluded from intersection counts; Salton denominators
// keep the full reference-set sizes.
BcResult build_bc_edges(const corpus::CorpusStore& store, const IdInterner& members,
                        const BcParams& params = {});

struct CiterRow {
    std::string citer_id;
    std::vector<std::string> cited_member_ids;
};

struct CcParams {
    size_t min_cociters = 3;
    size_t citer_cap = 200;  // citers citing more member papers are excluded
    int workers = 1;
};

struct CcResult {
    EdgeLayer layer;
    size_t citers_excluded = 0;
};

// Co-citation via the citer->cited-members join. Capped citers are removed
// entirely; Salton runs on the post-cap citer sets.
CcResult build_cc_edges(const std::vector<CiterRow>& citer_table, const IdInterner& members,
                        const CcParams& params = {});

AugmentedGraph merge_layers(const EdgeLayer& direct, const EdgeLayer& bc, const EdgeLayer& cc,
                            IdInterner members);

struct OrphanResult {
    AugmentedGraph graph;
    std::vector<std::string> orphans;  // sorted ids with no edge at all
};

OrphanResult remove_orphans(AugmentedGraph graph);

// CSV: src,dst,w_total,w_direct,w_bc,w_cc with 9 significant digits.
void write_edges_csv(const std::string& path, const AugmentedGraph& graph);
AugmentedGraph read_edges_csv(const std::string& path);

std::vector<CiterRow> read_citers_jsonl(const std::string& path);
void write_citers_jsonl(const std::string& path, const std::vector<CiterRow>& rows);

}  // namespace citegraph::graph
