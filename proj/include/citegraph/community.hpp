#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "citegraph/graph.hpp"

namespace citegraph::community {

enum class Level { L1, L2 };

// Node->community labeling over one graph. Node order follows
// graph.nodes; community ids are dense 0..n_communities-1.
struct Partition {
    Level level = Level::L1;
    double gamma = 0.0;
    uint64_t seed = 0;
    std::vector<std::string> ids;     // paper ids, sorted
    std::vector<uint32_t> labels;     // parallel to ids
    uint32_t n_communities = 0;

    // Label lookup by paper id (binary search). Throws std::out_of_range.
    uint32_t label_of(const std::string& id) const;
    int64_t find_label(const std::string& id) const;  // -1 if absent
    std::vector<uint32_t> community_sizes() const;
};

struct PartitionStats {
    double gamma = 0.0;
    uint32_t n_communities = 0;
    uint32_t max_size = 0;
    double max_share = 0.0;
    double quality = 0.0;
    std::map<uint32_t, uint32_t> size_histogram;  // community size -> count
};

PartitionStats partition_stats(const Partition& partition, double quality);

// Compact weighted undirected graph used by the optimizer. Weights come
// from the merged w_total column.
struct CommunityGraph {
    uint32_t n = 0;
    std::vector<uint64_t> offsets;   // n+1
    std::vector<uint32_t> adj;
    std::vector<double> adj_w;
    std::vector<double> self_loop;   // internal weight of an aggregated node
    std::vector<uint64_t> node_size; // original nodes represented

    static CommunityGraph from_augmented(const graph::AugmentedGraph& g);
    double total_edge_weight() const;  // self loops included
};

// Constant Potts Model quality: sum over communities of
// (internal weight - gamma * s*(s-1)/2), s counted in original nodes.
double cpm_quality(const CommunityGraph& g, const std::vector<uint32_t>& labels, double gamma);
double cpm_quality(const graph::AugmentedGraph& g, const Partition& partition, double gamma);

struct LeidenConfig {
    double gamma = 1e-4;
    uint64_t seed = 0;
    int max_passes = 10;
    double min_gain = 1e-9;  // pass-level convergence threshold on Q
};

// Weighted undirected Leiden optimizing CPM. Deterministic for a fixed
// (graph, gamma, seed): node visit order is a seeded shuffle, ties in move
// gains go to the smallest community id. The returned labeling is
// node-move optimal: no single node can strictly improve Q by moving to a
// neighboring community or to a fresh singleton.
std::vector<uint32_t> leiden_cpm_labels(const CommunityGraph& g, const LeidenConfig& config);

Partition leiden_cpm(const graph::AugmentedGraph& g, double gamma, uint64_t seed,
                     int max_passes = 10);

struct HierarchicalConfig {
    double gamma_l2 = 1e-2;
    uint64_t seed = 0;
    uint32_t min_split_size = 200;
    int max_passes = 10;
    int workers = 1;
};

// Re-runs Leiden inside every L1 community of size >= min_split_size at
// gamma_l2; smaller L1 communities keep a single L2 id. L2 ids are dense,
// assigned in (l1 id, sub id) order, so they never straddle L1 parents.
Partition hierarchical_l2(const graph::AugmentedGraph& g, const Partition& l1,
                          const HierarchicalConfig& config);

std::vector<PartitionStats> resolution_sweep(const graph::AugmentedGraph& g,
                                             const std::vector<double>& gammas, uint64_t seed,
                                             int max_passes = 10);

// TSV: paper_id <TAB> l1_id <TAB> l2_id. Both partitions must cover the
// same id set.
void write_partition_tsv(const std::string& path, const Partition& l1, const Partition& l2);
std::pair<Partition, Partition> read_partition_tsv(const std::string& path);

void write_stats_json(const std::string& path, const std::vector<PartitionStats>& stats);

}  // namespace citegraph::community
