#include "citegraph/community.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <numeric>

#include <nlohmann/json.hpp>

#include "citegraph/common/error.hpp"
#include "citegraph/common/io.hpp"
#include "citegraph/common/parallel.hpp"
#include "citegraph/common/rng.hpp"

using ordered_json = nlohmann::ordered_json;

namespace citegraph::community {

uint32_t Partition::label_of(const std::string& id) const {
    int64_t l = find_label(id);
    if (l < 0) throw std::out_of_range("no community label for id: " + id);
    return static_cast<uint32_t>(l);
}

int64_t Partition::find_label(const std::string& id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return -1;
    return labels[static_cast<size_t>(it - ids.begin())];
}

std::vector<uint32_t> Partition::community_sizes() const {
    std::vector<uint32_t> sizes(n_communities, 0);
    for (uint32_t l : labels) ++sizes.at(l);
    return sizes;
}

PartitionStats partition_stats(const Partition& partition, double quality) {
    PartitionStats stats;
    stats.gamma = partition.gamma;
    stats.n_communities = partition.n_communities;
    stats.quality = quality;
    auto sizes = partition.community_sizes();
    for (uint32_t s : sizes) {
        stats.max_size = std::max(stats.max_size, s);
        ++stats.size_histogram[s];
    }
    if (!partition.labels.empty())
        stats.max_share = static_cast<double>(stats.max_size) / partition.labels.size();
    return stats;
}

CommunityGraph CommunityGraph::from_augmented(const graph::AugmentedGraph& g) {
    CommunityGraph out;
    out.n = static_cast<uint32_t>(g.nodes.size());
    std::vector<uint32_t> dense(g.members.size(), UINT32_MAX);
    for (uint32_t i = 0; i < g.nodes.size(); ++i) dense[g.nodes[i]] = i;

    std::vector<uint32_t> degree(out.n, 0);
    for (const auto& e : g.edges) {
        ++degree[dense[e.a]];
        ++degree[dense[e.b]];
    }
    out.offsets.assign(out.n + 1, 0);
    for (uint32_t v = 0; v < out.n; ++v) out.offsets[v + 1] = out.offsets[v] + degree[v];
    out.adj.resize(out.offsets[out.n]);
    out.adj_w.resize(out.offsets[out.n]);
    std::vector<uint64_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
    for (const auto& e : g.edges) {
        uint32_t a = dense[e.a], b = dense[e.b];
        out.adj[cursor[a]] = b;
        out.adj_w[cursor[a]++] = e.w_total;
        out.adj[cursor[b]] = a;
        out.adj_w[cursor[b]++] = e.w_total;
    }
    out.self_loop.assign(out.n, 0.0);
    out.node_size.assign(out.n, 1);
    return out;
}

double CommunityGraph::total_edge_weight() const {
    double w = 0;
    for (uint32_t v = 0; v < n; ++v) {
        w += self_loop[v];
        for (uint64_t i = offsets[v]; i < offsets[v + 1]; ++i)
            if (adj[i] > v) w += adj_w[i];
    }
    return w;
}

double cpm_quality(const CommunityGraph& g, const std::vector<uint32_t>& labels, double gamma) {
    if (labels.size() != g.n) throw std::invalid_argument("labels do not cover all nodes");
    uint32_t n_comm = 0;
    for (uint32_t l : labels) n_comm = std::max(n_comm, l + 1);
    std::vector<double> internal(n_comm, 0.0);
    std::vector<uint64_t> size(n_comm, 0);
    for (uint32_t v = 0; v < g.n; ++v) {
        internal[labels[v]] += g.self_loop[v];
        size[labels[v]] += g.node_size[v];
        for (uint64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
            uint32_t u = g.adj[i];
            if (u > v && labels[u] == labels[v]) internal[labels[v]] += g.adj_w[i];
        }
    }
    double q = 0;
    for (uint32_t c = 0; c < n_comm; ++c) {
        double s = static_cast<double>(size[c]);
        q += internal[c] - gamma * s * (s - 1.0) / 2.0;
    }
    return q;
}

double cpm_quality(const graph::AugmentedGraph& g, const Partition& partition, double gamma) {
    CommunityGraph cg = CommunityGraph::from_augmented(g);
    std::vector<uint32_t> labels(cg.n);
    for (uint32_t i = 0; i < g.nodes.size(); ++i) {
        const std::string& id = g.members.str(g.nodes[i]);
        int64_t l = partition.find_label(id);
        if (l < 0) throw InputError("partition is missing a label for node " + id);
        labels[i] = static_cast<uint32_t>(l);
    }
    return cpm_quality(cg, labels, gamma);
}

namespace {

constexpr double kMoveGainEps = 1e-12;

// Renumber community ids densely, ordered by smallest member node index.
uint32_t densify(std::vector<uint32_t>& labels) {
    uint32_t next = 0;
    std::vector<uint32_t> remap(labels.size(), UINT32_MAX);
    for (auto& l : labels) {
        if (remap[l] == UINT32_MAX) remap[l] = next++;
        l = remap[l];
    }
    return next;
}

// Queue-driven CPM local moving. `labels` holds dense community ids on
// entry; ids may become sparse during the run and are re-densified by the
// caller. Returns accumulated quality gain.
double local_move(const CommunityGraph& g, std::vector<uint32_t>& labels, double gamma,
                  Rng& rng) {
    uint32_t n = g.n;
    uint32_t n_comm = 0;
    for (uint32_t l : labels) n_comm = std::max(n_comm, l + 1);

    std::vector<double> comm_size(n + 1, 0.0);
    std::vector<uint32_t> comm_members(n + 1, 0);
    for (uint32_t v = 0; v < n; ++v) {
        comm_size[labels[v]] += static_cast<double>(g.node_size[v]);
        ++comm_members[labels[v]];
    }
    std::vector<uint32_t> free_ids;
    uint32_t next_fresh = n_comm;

    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::deque<uint32_t> queue(order.begin(), order.end());
    std::vector<bool> queued(n, true);

    std::vector<double> w_to(n + 1, 0.0);
    std::vector<uint32_t> touched;
    double total_gain = 0.0;

    while (!queue.empty()) {
        uint32_t v = queue.front();
        queue.pop_front();
        queued[v] = false;

        uint32_t a = labels[v];
        double sv = static_cast<double>(g.node_size[v]);
        touched.clear();
        for (uint64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
            uint32_t c = labels[g.adj[i]];
            if (w_to[c] == 0.0) touched.push_back(c);
            w_to[c] += g.adj_w[i];
        }
        double stay = w_to[a] - gamma * sv * (comm_size[a] - sv);

        // Best strictly-improving target among neighboring communities;
        // ties on gain go to the smallest community id.
        double best_gain = 0.0;
        uint32_t best = UINT32_MAX;
        for (uint32_t c : touched) {
            if (c == a) continue;
            double gain = (w_to[c] - gamma * sv * comm_size[c]) - stay;
            if (gain <= kMoveGainEps) continue;
            if (best == UINT32_MAX || gain > best_gain || (gain == best_gain && c < best)) {
                best_gain = gain;
                best = c;
            }
        }
        // A fresh singleton is the largest-id candidate: it must beat every
        // neighboring community strictly.
        bool fresh = false;
        double fresh_gain = -stay;
        if (comm_members[a] > 1 && fresh_gain > kMoveGainEps &&
            (best == UINT32_MAX || fresh_gain > best_gain)) {
            fresh = true;
            best_gain = fresh_gain;
        }

        for (uint32_t c : touched) w_to[c] = 0.0;
        if (best == UINT32_MAX && !fresh) continue;

        if (fresh) {
            if (!free_ids.empty()) {
                best = free_ids.back();
                free_ids.pop_back();
            } else {
                best = next_fresh++;
            }
        }
        comm_size[a] -= sv;
        --comm_members[a];
        if (comm_members[a] == 0) free_ids.push_back(a);
        comm_size[best] += sv;
        ++comm_members[best];
        labels[v] = best;
        total_gain += best_gain;

        for (uint64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
            uint32_t u = g.adj[i];
            if (!queued[u] && labels[u] != best) {
                queue.push_back(u);
                queued[u] = true;
            }
        }
    }
    return total_gain;
}

// Leiden refinement: within each local-moving community, rebuild structure
// from singletons, merging only well-connected nodes into well-connected
// sub-communities. Deterministic greedy variant: argmax gain, ties to the
// smallest sub-community id.
std::vector<uint32_t> refine(const CommunityGraph& g, const std::vector<uint32_t>& labels,
                             double gamma, Rng& rng) {
    uint32_t n = g.n;
    uint32_t n_comm = 0;
    for (uint32_t l : labels) n_comm = std::max(n_comm, l + 1);

    std::vector<double> comm_size(n_comm, 0.0);
    for (uint32_t v = 0; v < n; ++v) comm_size[labels[v]] += static_cast<double>(g.node_size[v]);

    // Weight from v to the rest of its community.
    std::vector<double> deg_in(n, 0.0);
    for (uint32_t v = 0; v < n; ++v)
        for (uint64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i)
            if (labels[g.adj[i]] == labels[v]) deg_in[v] += g.adj_w[i];

    std::vector<uint32_t> ref(n);
    std::iota(ref.begin(), ref.end(), 0);
    std::vector<double> ref_size(n), ref_cut(n);
    std::vector<uint32_t> ref_members(n, 1);
    for (uint32_t v = 0; v < n; ++v) {
        ref_size[v] = static_cast<double>(g.node_size[v]);
        ref_cut[v] = deg_in[v];
    }

    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<double> w_to(n, 0.0);
    std::vector<uint32_t> touched;

    for (uint32_t v : order) {
        if (ref_members[ref[v]] != 1 || ref[v] != v) continue;  // only lone singletons move
        uint32_t p = labels[v];
        double sv = static_cast<double>(g.node_size[v]);
        double sp = comm_size[p];
        if (deg_in[v] < gamma * sv * (sp - sv)) continue;  // v not well connected

        touched.clear();
        for (uint64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
            uint32_t u = g.adj[i];
            if (labels[u] != p || u == v) continue;
            uint32_t t = ref[u];
            if (w_to[t] == 0.0) touched.push_back(t);
            w_to[t] += g.adj_w[i];
        }

        double best_gain = 0.0;
        uint32_t best = UINT32_MAX;
        for (uint32_t t : touched) {
            if (t == v) continue;
            if (ref_cut[t] < gamma * ref_size[t] * (sp - ref_size[t])) continue;
            double gain = w_to[t] - gamma * sv * ref_size[t];
            if (gain <= kMoveGainEps) continue;
            if (best == UINT32_MAX || gain > best_gain || (gain == best_gain && t < best)) {
                best_gain = gain;
                best = t;
            }
        }
        double w_to_best = best == UINT32_MAX ? 0.0 : w_to[best];
        for (uint32_t t : touched) w_to[t] = 0.0;
        if (best == UINT32_MAX) continue;

        ref[v] = best;
        ref_members[best] += 1;
        ref_size[best] += sv;
        ref_cut[best] += deg_in[v] - 2.0 * w_to_best;
        ref_members[v] = 0;
    }
    return ref;
}

struct Aggregated {
    CommunityGraph graph;
    std::vector<uint32_t> node_of;  // old node -> new node
    std::vector<uint32_t> labels;   // new node -> carried partition label
};

Aggregated aggregate(const CommunityGraph& g, const std::vector<uint32_t>& ref,
                     const std::vector<uint32_t>& labels) {
    std::vector<uint32_t> dense = ref;
    uint32_t n_new = densify(dense);

    Aggregated out;
    out.node_of = dense;
    out.graph.n = n_new;
    out.graph.node_size.assign(n_new, 0);
    out.graph.self_loop.assign(n_new, 0.0);
    out.labels.assign(n_new, 0);
    for (uint32_t v = 0; v < g.n; ++v) {
        out.graph.node_size[dense[v]] += g.node_size[v];
        out.graph.self_loop[dense[v]] += g.self_loop[v];
        out.labels[dense[v]] = labels[v];
    }

    std::vector<std::pair<uint64_t, double>> cross;
    for (uint32_t v = 0; v < g.n; ++v) {
        for (uint64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
            uint32_t u = g.adj[i];
            if (u <= v) continue;  // each undirected edge once
            uint32_t cv = dense[v], cu = dense[u];
            if (cv == cu) {
                out.graph.self_loop[cv] += g.adj_w[i];
            } else {
                uint32_t lo = std::min(cv, cu), hi = std::max(cv, cu);
                cross.emplace_back((static_cast<uint64_t>(lo) << 32) | hi, g.adj_w[i]);
            }
        }
    }
    std::sort(cross.begin(), cross.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    std::vector<uint32_t> degree(n_new, 0);
    std::vector<std::pair<uint64_t, double>> merged;
    for (size_t i = 0; i < cross.size();) {
        size_t j = i;
        double w = 0;
        while (j < cross.size() && cross[j].first == cross[i].first) w += cross[j++].second;
        merged.emplace_back(cross[i].first, w);
        ++degree[static_cast<uint32_t>(cross[i].first >> 32)];
        ++degree[static_cast<uint32_t>(cross[i].first)];
        i = j;
    }
    out.graph.offsets.assign(n_new + 1, 0);
    for (uint32_t v = 0; v < n_new; ++v)
        out.graph.offsets[v + 1] = out.graph.offsets[v] + degree[v];
    out.graph.adj.resize(out.graph.offsets[n_new]);
    out.graph.adj_w.resize(out.graph.offsets[n_new]);
    std::vector<uint64_t> cursor(out.graph.offsets.begin(), out.graph.offsets.end() - 1);
    for (const auto& [key, w] : merged) {
        uint32_t a = static_cast<uint32_t>(key >> 32), b = static_cast<uint32_t>(key);
        out.graph.adj[cursor[a]] = b;
        out.graph.adj_w[cursor[a]++] = w;
        out.graph.adj[cursor[b]] = a;
        out.graph.adj_w[cursor[b]++] = w;
    }
    return out;
}

}  // namespace

std::vector<uint32_t> leiden_cpm_labels(const CommunityGraph& g, const LeidenConfig& config) {
    if (g.n == 0) throw std::invalid_argument("leiden_cpm: empty graph");
    Rng rng(derive_seed(config.seed, "leiden"));

    CommunityGraph level = g;
    std::vector<uint32_t> node_of(g.n);  // original node -> current level node
    std::iota(node_of.begin(), node_of.end(), 0);
    std::vector<uint32_t> labels(g.n);
    std::iota(labels.begin(), labels.end(), 0);

    double q_prev = cpm_quality(g, labels, config.gamma);
    for (int pass = 0; pass < config.max_passes; ++pass) {
        local_move(level, labels, config.gamma, rng);
        densify(labels);

        std::vector<uint32_t> orig_labels(g.n);
        for (uint32_t v = 0; v < g.n; ++v) orig_labels[v] = labels[node_of[v]];
        double q = cpm_quality(g, orig_labels, config.gamma);
        bool improved = q - q_prev >= config.min_gain;
        q_prev = q;

        std::vector<uint32_t> ref = refine(level, labels, config.gamma, rng);
        Aggregated agg = aggregate(level, ref, labels);
        // A pass is a fixpoint only when local moving gained nothing AND
        // refinement left nothing to fold. Zero-gain passes that still
        // shrink the graph must go on: community-level moves only become
        // single-node moves once each community is one aggregate node.
        if (agg.graph.n == level.n) {
            if (!improved) break;
            continue;
        }
        for (uint32_t v = 0; v < g.n; ++v) node_of[v] = agg.node_of[node_of[v]];
        level = std::move(agg.graph);
        labels = std::move(agg.labels);
        densify(labels);
    }

    // Final polish on the original graph guarantees single-node-move
    // optimality of the returned labeling.
    std::vector<uint32_t> out(g.n);
    for (uint32_t v = 0; v < g.n; ++v) out[v] = labels[node_of[v]];
    densify(out);
    local_move(g, out, config.gamma, rng);
    densify(out);
    return out;
}

Partition leiden_cpm(const graph::AugmentedGraph& g, double gamma, uint64_t seed,
                     int max_passes) {
    if (gamma <= 0) throw std::invalid_argument("gamma must be positive");
    CommunityGraph cg = CommunityGraph::from_augmented(g);
    LeidenConfig config;
    config.gamma = gamma;
    config.seed = seed;
    config.max_passes = max_passes;
    std::vector<uint32_t> labels = leiden_cpm_labels(cg, config);

    Partition p;
    p.level = Level::L1;
    p.gamma = gamma;
    p.seed = seed;
    p.ids.reserve(g.nodes.size());
    for (uint32_t node : g.nodes) p.ids.push_back(g.members.str(node));
    p.labels = std::move(labels);
    p.n_communities = p.labels.empty()
                          ? 0
                          : *std::max_element(p.labels.begin(), p.labels.end()) + 1;
    return p;
}

Partition hierarchical_l2(const graph::AugmentedGraph& g, const Partition& l1,
                          const HierarchicalConfig& config) {
    CommunityGraph cg = CommunityGraph::from_augmented(g);
    if (l1.ids.size() != cg.n) throw InputError("L1 partition does not cover the graph");

    // Group node indexes by L1 community. Partition ids are aligned with
    // graph.nodes by construction; verify rather than assume.
    std::vector<std::vector<uint32_t>> groups(l1.n_communities);
    for (uint32_t i = 0; i < cg.n; ++i) {
        if (l1.ids[i] != g.members.str(g.nodes[i]))
            throw InputError("L1 partition ids do not match the graph nodes");
        groups[l1.labels[i]].push_back(i);
    }

    std::vector<std::vector<uint32_t>> sub_labels(groups.size());
    std::vector<uint32_t> n_sub(groups.size(), 1);

    parallel_chunks(groups.size(), config.workers, [&](size_t b, size_t e) {
        std::vector<uint32_t> local(cg.n, UINT32_MAX);
        for (size_t c = b; c < e; ++c) {
            const auto& members = groups[c];
            if (members.size() < config.min_split_size) continue;  // inherit L1 label

            for (uint32_t i = 0; i < members.size(); ++i) local[members[i]] = i;
            CommunityGraph sub;
            sub.n = static_cast<uint32_t>(members.size());
            sub.node_size.assign(sub.n, 1);
            sub.self_loop.assign(sub.n, 0.0);
            sub.offsets.assign(sub.n + 1, 0);
            std::vector<uint32_t> degree(sub.n, 0);
            for (uint32_t i = 0; i < members.size(); ++i) {
                uint32_t v = members[i];
                for (uint64_t k = cg.offsets[v]; k < cg.offsets[v + 1]; ++k)
                    if (local[cg.adj[k]] != UINT32_MAX) ++degree[i];
            }
            for (uint32_t i = 0; i < sub.n; ++i) sub.offsets[i + 1] = sub.offsets[i] + degree[i];
            sub.adj.resize(sub.offsets[sub.n]);
            sub.adj_w.resize(sub.offsets[sub.n]);
            std::vector<uint64_t> cursor(sub.offsets.begin(), sub.offsets.end() - 1);
            for (uint32_t i = 0; i < members.size(); ++i) {
                uint32_t v = members[i];
                for (uint64_t k = cg.offsets[v]; k < cg.offsets[v + 1]; ++k) {
                    uint32_t lu = local[cg.adj[k]];
                    if (lu == UINT32_MAX) continue;
                    sub.adj[cursor[i]] = lu;
                    sub.adj_w[cursor[i]++] = cg.adj_w[k];
                }
            }
            for (uint32_t v : members) local[v] = UINT32_MAX;

            LeidenConfig lc;
            lc.gamma = config.gamma_l2;
            lc.seed = derive_seed(config.seed, "l2", c);
            lc.max_passes = config.max_passes;
            sub_labels[c] = leiden_cpm_labels(sub, lc);
            n_sub[c] = *std::max_element(sub_labels[c].begin(), sub_labels[c].end()) + 1;
        }
    });

    // Dense global L2 ids in (l1 id, sub id) order: children never straddle
    // L1 parents.
    std::vector<uint32_t> base(groups.size() + 1, 0);
    for (size_t c = 0; c < groups.size(); ++c) base[c + 1] = base[c] + n_sub[c];

    Partition p;
    p.level = Level::L2;
    p.gamma = config.gamma_l2;
    p.seed = config.seed;
    p.ids = l1.ids;
    p.labels.assign(cg.n, 0);
    for (size_t c = 0; c < groups.size(); ++c) {
        for (uint32_t i = 0; i < groups[c].size(); ++i) {
            uint32_t sub = sub_labels[c].empty() ? 0 : sub_labels[c][i];
            p.labels[groups[c][i]] = base[c] + sub;
        }
    }
    p.n_communities = base.back();
    return p;
}

std::vector<PartitionStats> resolution_sweep(const graph::AugmentedGraph& g,
                                             const std::vector<double>& gammas, uint64_t seed,
                                             int max_passes) {
    for (size_t i = 0; i < gammas.size(); ++i) {
        if (gammas[i] <= 0) throw std::invalid_argument("gammas must be positive");
        if (i > 0 && gammas[i] < gammas[i - 1])
            throw std::invalid_argument("gammas must be sorted ascending");
    }
    std::vector<PartitionStats> out;
    for (double gamma : gammas) {
        uint64_t run_seed = derive_seed(seed, "sweep", fnv1a64(io::format_double(gamma)));
        Partition p = leiden_cpm(g, gamma, run_seed, max_passes);
        out.push_back(partition_stats(p, cpm_quality(g, p, gamma)));
    }
    return out;
}

void write_partition_tsv(const std::string& path, const Partition& l1, const Partition& l2) {
    if (l1.ids != l2.ids) throw InputError("L1 and L2 partitions cover different id sets");
    io::atomic_write(path, [&](std::ostream& out) {
        for (size_t i = 0; i < l1.ids.size(); ++i)
            out << l1.ids[i] << '\t' << l1.labels[i] << '\t' << l2.labels[i] << '\n';
    });
}

std::pair<Partition, Partition> read_partition_tsv(const std::string& path) {
    Partition l1, l2;
    l1.level = Level::L1;
    l2.level = Level::L2;
    io::for_each_line(path, [&](size_t n, std::string_view line) {
        size_t t1 = line.find('\t');
        size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string_view::npos)
            throw InputError(path + ":" + std::to_string(n) + ": expected 3 tab-separated fields");
        std::string id(line.substr(0, t1));
        uint32_t a = 0, b = 0;
        auto parse_u32 = [&](std::string_view f, uint32_t& out_v) {
            auto res = std::from_chars(f.data(), f.data() + f.size(), out_v);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size())
                throw InputError(path + ":" + std::to_string(n) + ": bad community id");
        };
        parse_u32(line.substr(t1 + 1, t2 - t1 - 1), a);
        parse_u32(line.substr(t2 + 1), b);
        l1.ids.push_back(id);
        l1.labels.push_back(a);
        l2.labels.push_back(b);
    });
    l2.ids = l1.ids;
    for (size_t i = 1; i < l1.ids.size(); ++i)
        if (l1.ids[i - 1] >= l1.ids[i])
            throw InputError(path + ": ids not sorted/unique");
    l1.n_communities =
        l1.labels.empty() ? 0 : *std::max_element(l1.labels.begin(), l1.labels.end()) + 1;
    l2.n_communities =
        l2.labels.empty() ? 0 : *std::max_element(l2.labels.begin(), l2.labels.end()) + 1;
    return {std::move(l1), std::move(l2)};
}

void write_stats_json(const std::string& path, const std::vector<PartitionStats>& stats) {
    io::atomic_write(path, [&](std::ostream& out) {
        ordered_json arr = ordered_json::array();
        for (const auto& s : stats) {
            ordered_json j;
            j["gamma"] = s.gamma;
            j["n_communities"] = s.n_communities;
            j["max_size"] = s.max_size;
            j["max_share"] = s.max_share;
            j["quality"] = s.quality;
            ordered_json hist = ordered_json::object();
            for (const auto& [size, count] : s.size_histogram)
                hist[std::to_string(size)] = count;
            j["size_histogram"] = hist;
            arr.push_back(j);
        }
        out << arr.dump(2) << '\n';
    });
}

}  // namespace citegraph::community
