#include "citegraph/graph.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "citegraph/common/error.hpp"
#include "citegraph/common/io.hpp"
#include "citegraph/common/parallel.hpp"

using ordered_json = nlohmann::ordered_json;

namespace citegraph::graph {

double salton_cosine(size_t shared, size_t size_a, size_t size_b) {
    if (size_a == 0 || size_b == 0)
        throw std::invalid_argument("salton_cosine: zero-sized set");
    if (shared > size_a || shared > size_b)
        throw std::invalid_argument("salton_cosine: shared exceeds a set size");
    return static_cast<double>(shared) /
           std::sqrt(static_cast<double>(size_a) * static_cast<double>(size_b));
}

namespace {

inline uint64_t pair_key(uint32_t a, uint32_t b) {
    return (static_cast<uint64_t>(a) << 32) | b;
}

// Open-addressing u64->u32 counter. The std::unordered_map overhead
// dominates the BC/CC joins at the 100K-paper scale, so the hot loop gets
// its own flat table. Keys must be nonzero (guaranteed: a < b so b >= 1).
class PairCounter {
  public:
    explicit PairCounter(size_t expected = 1024) {
        size_t cap = 16;
        while (cap < expected * 2) cap <<= 1;
        keys_.assign(cap, 0);
        counts_.assign(cap, 0);
        mask_ = cap - 1;
        grow_at_ = cap - cap / 4;
    }

    void add(uint64_t key, uint32_t delta = 1) {
        size_t i = slot(key);
        for (;;) {
            if (keys_[i] == key) {
                counts_[i] += delta;
                return;
            }
            if (keys_[i] == 0) {
                keys_[i] = key;
                counts_[i] = delta;
                if (++size_ >= grow_at_) grow();
                return;
            }
            i = (i + 1) & mask_;
        }
    }

    size_t size() const { return size_; }

    template <typename Fn>
    void for_each(Fn fn) const {
        for (size_t i = 0; i <= mask_; ++i)
            if (keys_[i] != 0) fn(keys_[i], counts_[i]);
    }

  private:
    size_t slot(uint64_t key) const {
        uint64_t z = key * 0x9e3779b97f4a7c15ULL;
        z ^= z >> 29;
        return static_cast<size_t>(z) & mask_;
    }

    void grow() {
        std::vector<uint64_t> old_keys = std::move(keys_);
        std::vector<uint32_t> old_counts = std::move(counts_);
        size_t cap = (mask_ + 1) * 2;
        keys_.assign(cap, 0);
        counts_.assign(cap, 0);
        mask_ = cap - 1;
        grow_at_ = cap - cap / 4;
        size_ = 0;
        for (size_t i = 0; i < old_keys.size(); ++i)
            if (old_keys[i] != 0) add(old_keys[i], old_counts[i]);
    }

    std::vector<uint64_t> keys_;
    std::vector<uint32_t> counts_;
    size_t mask_ = 0, size_ = 0, grow_at_ = 0;
};

void sort_edges(std::vector<LayerEdge>& edges) {
    std::sort(edges.begin(), edges.end(), [](const LayerEdge& x, const LayerEdge& y) {
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
}

// Shared pair-join core for BC and CC: `postings` is a list of groups, each
// a sorted list of member indexes; every within-group pair is counted once
// per group. Sharded by group ranges; per-shard counts merge by summation.
PairCounter count_pairs(const std::vector<std::vector<uint32_t>>& postings, int workers) {
    size_t expected = 0;
    for (const auto& p : postings) expected += p.size() * 2;
    if (workers <= 1 || postings.size() < 64) {
        PairCounter counter(std::max<size_t>(expected, 64));
        for (const auto& p : postings)
            for (size_t i = 0; i + 1 < p.size(); ++i)
                for (size_t j = i + 1; j < p.size(); ++j) counter.add(pair_key(p[i], p[j]));
        return counter;
    }
    std::vector<PairCounter> partial;
    std::mutex mu;
    parallel_chunks(postings.size(), workers, [&](size_t b, size_t e) {
        PairCounter local(4096);
        for (size_t g = b; g < e; ++g) {
            const auto& p = postings[g];
            for (size_t i = 0; i + 1 < p.size(); ++i)
                for (size_t j = i + 1; j < p.size(); ++j) local.add(pair_key(p[i], p[j]));
        }
        std::lock_guard<std::mutex> lock(mu);
        partial.push_back(std::move(local));
    });
    PairCounter counter(std::max<size_t>(expected, 64));
    for (const auto& part : partial)
        part.for_each([&](uint64_t key, uint32_t cnt) { counter.add(key, cnt); });
    return counter;
}

}  // namespace

DirectResult build_direct_edges(const corpus::CorpusStore& store, const IdInterner& members) {
    DirectResult result;
    result.layer.kind = LayerKind::direct;
    std::vector<uint64_t> pairs;
    for (const auto& rec : store.records()) {
        int64_t a = members.find(rec.paper_id);
        if (a < 0) continue;
        for (const auto& ref : rec.references) {
            if (ref == rec.paper_id) {
                ++result.self_citations_ignored;
                continue;
            }
            int64_t b = members.find(ref);
            if (b < 0) continue;
            uint32_t lo = static_cast<uint32_t>(std::min(a, b));
            uint32_t hi = static_cast<uint32_t>(std::max(a, b));
            pairs.push_back(pair_key(lo, hi));
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    result.layer.edges.reserve(pairs.size());
    for (uint64_t key : pairs)
        result.layer.edges.push_back(
            {static_cast<uint32_t>(key >> 32), static_cast<uint32_t>(key), 1.0});
    return result;
}

BcResult build_bc_edges(const corpus::CorpusStore& store, const IdInterner& members,
                        const BcParams& params) {
    BcResult result;
    result.layer.kind = LayerKind::bc;

    // Full reference-set sizes (self-references excluded).
    std::vector<uint32_t> ref_count(members.size(), 0);
    std::vector<std::pair<std::string_view, uint32_t>> ref_pairs;
    for (const auto& rec : store.records()) {
        int64_t m = members.find(rec.paper_id);
        if (m < 0) continue;
        uint32_t idx = static_cast<uint32_t>(m);
        for (const auto& ref : rec.references) {
            if (ref == rec.paper_id) continue;
            ref_pairs.emplace_back(ref, idx);
            ++ref_count[idx];
        }
        if (ref_count[idx] == 0) ++result.papers_without_references;
    }
    std::sort(ref_pairs.begin(), ref_pairs.end());

    // Group by reference into postings, dropping hot references.
    std::vector<std::vector<uint32_t>> postings;
    for (size_t i = 0; i < ref_pairs.size();) {
        size_t j = i;
        while (j < ref_pairs.size() && ref_pairs[j].first == ref_pairs[i].first) ++j;
        size_t n = j - i;
        if (n > params.hot_ref_cap) {
            ++result.hot_refs_excluded;
        } else if (n >= 2) {
            std::vector<uint32_t> group;
            group.reserve(n);
            for (size_t k = i; k < j; ++k) group.push_back(ref_pairs[k].second);
            postings.push_back(std::move(group));
        }
        i = j;
    }
    ref_pairs.clear();
    ref_pairs.shrink_to_fit();

    PairCounter counter = count_pairs(postings, params.workers);
    counter.for_each([&](uint64_t key, uint32_t shared) {
        if (shared < params.min_shared) return;
        uint32_t a = static_cast<uint32_t>(key >> 32), b = static_cast<uint32_t>(key);
        double w = salton_cosine(shared, ref_count[a], ref_count[b]);
        result.layer.edges.push_back({a, b, w});
    });
    sort_edges(result.layer.edges);
    return result;
}

CcResult build_cc_edges(const std::vector<CiterRow>& citer_table, const IdInterner& members,
                        const CcParams& params) {
    CcResult result;
    result.layer.kind = LayerKind::cc;

    // Merge rows by citer id, resolve to member indexes.
    std::unordered_map<std::string, std::vector<uint32_t>> by_citer;
    by_citer.reserve(citer_table.size());
    for (const auto& row : citer_table) {
        auto& cited = by_citer[row.citer_id];
        for (const auto& id : row.cited_member_ids) {
            int64_t m = members.find(id);
            if (m >= 0) cited.push_back(static_cast<uint32_t>(m));
        }
    }

    std::vector<uint32_t> citer_count(members.size(), 0);
    std::vector<std::vector<uint32_t>> postings;
    for (auto& [citer, cited] : by_citer) {
        std::sort(cited.begin(), cited.end());
        cited.erase(std::unique(cited.begin(), cited.end()), cited.end());
        if (cited.size() > params.citer_cap) {
            ++result.citers_excluded;
            continue;
        }
        for (uint32_t m : cited) ++citer_count[m];
        if (cited.size() >= 2) postings.push_back(std::move(cited));
    }

    PairCounter counter = count_pairs(postings, params.workers);
    counter.for_each([&](uint64_t key, uint32_t common) {
        if (common < params.min_cociters) return;
        uint32_t a = static_cast<uint32_t>(key >> 32), b = static_cast<uint32_t>(key);
        double w = salton_cosine(common, citer_count[a], citer_count[b]);
        result.layer.edges.push_back({a, b, w});
    });
    sort_edges(result.layer.edges);
    return result;
}

AugmentedGraph merge_layers(const EdgeLayer& direct, const EdgeLayer& bc, const EdgeLayer& cc,
                            IdInterner members) {
    AugmentedGraph g;
    g.members = std::move(members);

    const std::vector<LayerEdge>* layers[3] = {&direct.edges, &bc.edges, &cc.edges};
    size_t pos[3] = {0, 0, 0};
    auto head_key = [&](int l) -> uint64_t {
        if (pos[l] >= layers[l]->size()) return UINT64_MAX;
        const LayerEdge& e = (*layers[l])[pos[l]];
        return pair_key(e.a, e.b);
    };
    for (;;) {
        uint64_t k = std::min({head_key(0), head_key(1), head_key(2)});
        if (k == UINT64_MAX) break;
        MergedEdge e{static_cast<uint32_t>(k >> 32), static_cast<uint32_t>(k), 0, 0, 0, 0};
        if (head_key(0) == k) e.w_direct = (*layers[0])[pos[0]++].w;
        if (head_key(1) == k) e.w_bc = (*layers[1])[pos[1]++].w;
        if (head_key(2) == k) e.w_cc = (*layers[2])[pos[2]++].w;
        e.w_total = e.w_direct + e.w_bc + e.w_cc;
        g.edges.push_back(e);
    }

    std::vector<uint32_t> nodes;
    nodes.reserve(g.edges.size() * 2);
    for (const auto& e : g.edges) {
        nodes.push_back(e.a);
        nodes.push_back(e.b);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    g.nodes = std::move(nodes);
    return g;
}

OrphanResult remove_orphans(AugmentedGraph graph) {
    OrphanResult result;
    std::vector<bool> has_edge(graph.members.size(), false);
    for (uint32_t n : graph.nodes) has_edge[n] = true;
    for (uint32_t i = 0; i < graph.members.size(); ++i)
        if (!has_edge[i]) result.orphans.push_back(graph.members.str(i));
    result.graph = std::move(graph);
    return result;
}

void write_edges_csv(const std::string& path, const AugmentedGraph& graph) {
    for (const auto& id : graph.members.all()) {
        if (id.find_first_of(",\"\r\n") != std::string::npos)
            throw InputError("paper id not CSV-safe: " + id);
    }
    io::atomic_write(path, [&](std::ostream& out) {
        out << "src,dst,w_total,w_direct,w_bc,w_cc\n";
        for (const auto& e : graph.edges) {
            out << graph.members.str(e.a) << ',' << graph.members.str(e.b) << ','
                << io::format_9sig(e.w_total) << ',' << io::format_9sig(e.w_direct) << ','
                << io::format_9sig(e.w_bc) << ',' << io::format_9sig(e.w_cc) << '\n';
        }
    });
}

namespace {

double parse_weight(std::string_view field, const std::string& path, size_t line) {
    double v = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw InputError(path + ":" + std::to_string(line) + ": bad weight '" +
                         std::string(field) + "'");
    return v;
}

std::array<std::string_view, 6> split6(std::string_view line, const std::string& path,
                                       size_t line_no) {
    std::array<std::string_view, 6> out;
    size_t field = 0, start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            if (field >= 6)
                throw InputError(path + ":" + std::to_string(line_no) + ": too many fields");
            out[field++] = line.substr(start, i - start);
            start = i + 1;
        }
    }
    if (field != 6)
        throw InputError(path + ":" + std::to_string(line_no) + ": expected 6 fields");
    return out;
}

}  // namespace

AugmentedGraph read_edges_csv(const std::string& path) {
    // Pass 1: collect endpoint ids.
    std::unordered_set<std::string> id_set;
    io::for_each_line(path, [&](size_t n, std::string_view line) {
        if (n == 1 && line.rfind("src,", 0) == 0) return;
        auto f = split6(line, path, n);
        id_set.emplace(f[0]);
        id_set.emplace(f[1]);
    });
    std::vector<std::string> ids(id_set.begin(), id_set.end());
    AugmentedGraph g;
    g.members = IdInterner(std::move(ids));

    // Pass 2: parse edges.
    io::for_each_line(path, [&](size_t n, std::string_view line) {
        if (n == 1 && line.rfind("src,", 0) == 0) return;
        auto f = split6(line, path, n);
        MergedEdge e;
        e.a = g.members.index(std::string(f[0]));
        e.b = g.members.index(std::string(f[1]));
        e.w_total = parse_weight(f[2], path, n);
        e.w_direct = parse_weight(f[3], path, n);
        e.w_bc = parse_weight(f[4], path, n);
        e.w_cc = parse_weight(f[5], path, n);
        if (e.a == e.b) throw InputError(path + ":" + std::to_string(n) + ": self loop");
        if (e.b < e.a) std::swap(e.a, e.b);
        g.edges.push_back(e);
    });
    std::sort(g.edges.begin(), g.edges.end(), [](const MergedEdge& x, const MergedEdge& y) {
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    std::vector<uint32_t> nodes;
    nodes.reserve(g.members.size());
    for (uint32_t i = 0; i < g.members.size(); ++i) nodes.push_back(i);
    g.nodes = std::move(nodes);
    return g;
}

std::vector<CiterRow> read_citers_jsonl(const std::string& path) {
    std::vector<CiterRow> rows;
    io::for_each_line(path, [&](size_t n, std::string_view line) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(path + ":" + std::to_string(n) + ": " + e.what());
        }
        CiterRow row;
        if (!j.contains("citer_id") || !j["citer_id"].is_string())
            throw InputError(path + ":" + std::to_string(n) + ": missing citer_id");
        row.citer_id = j["citer_id"].get<std::string>();
        if (!j.contains("cited_member_ids") || !j["cited_member_ids"].is_array())
            throw InputError(path + ":" + std::to_string(n) + ": missing cited_member_ids");
        for (const auto& v : j["cited_member_ids"]) {
            if (!v.is_string())
                throw InputError(path + ":" + std::to_string(n) + ": non-string cited id");
            row.cited_member_ids.push_back(v.get<std::string>());
        }
        rows.push_back(std::move(row));
    });
    return rows;
}

void write_citers_jsonl(const std::string& path, const std::vector<CiterRow>& rows) {
    io::atomic_write(path, [&](std::ostream& out) {
        for (const auto& row : rows) {
            ordered_json j;
            j["citer_id"] = row.citer_id;
            j["cited_member_ids"] = row.cited_member_ids;
            out << j.dump() << '\n';
        }
    });
}

}  // namespace citegraph::graph
