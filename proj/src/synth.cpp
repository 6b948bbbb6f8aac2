#include "citegraph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "citegraph/common/error.hpp"
#include "citegraph/common/io.hpp"
#include "citegraph/common/rng.hpp"

using ordered_json = nlohmann::ordered_json;

namespace citegraph::synth {

void PlantedSpec::validate() const {
    if (n_l1 < 1 || l2_per_l1 < 1 || papers_per_l2 < 1 || n_domains < 1)
        throw std::invalid_argument("planted spec: all counts must be >= 1");
    auto prob = [](double p, const char* name) {
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument(std::string("planted spec: ") + name + " not in [0,1]");
    };
    prob(p_ref_in_l2, "p_ref_in_l2");
    prob(p_ref_in_l1, "p_ref_in_l1");
    prob(p_ref_cross, "p_ref_cross");
    prob(text.p_agenda_in_text, "p_agenda_in_text");
    prob(text.p_agenda_leak, "p_agenda_leak");
    prob(cite.p_cite_in_l2, "p_cite_in_l2");
    prob(cite.p_cite_in_l1, "p_cite_in_l1");
    prob(cite.p_cite_cross, "p_cite_cross");
    prob(cite.p_cite_canonical, "p_cite_canonical");
    prob(citer.p_cite_member, "p_cite_member");
    prob(orphan_frac, "orphan_frac");
    // Non-strict so the flat null (all three equal) is generable for
    // no-structure baselines.
    if (!(p_ref_in_l2 >= p_ref_in_l1 && p_ref_in_l1 >= p_ref_cross))
        throw std::invalid_argument(
            "planted spec requires p_ref_in_l2 >= p_ref_in_l1 >= p_ref_cross");
    if (embedding.dim < 2) throw std::invalid_argument("embedding dim must be >= 2");
    if (embedding.noise_sigma < 0) throw std::invalid_argument("noise_sigma must be >= 0");
    if (reps_per_query < 1) throw std::invalid_argument("reps_per_query must be >= 1");
    if (reps_per_query > papers_per_l2)
        throw std::invalid_argument("reps_per_query exceeds papers per L2");
}

namespace {

// Visits the hits of n independent Bernoulli(p) trials in O(hits) via
// geometric skips; exact in distribution, deterministic under the stream.
template <typename Fn>
void bernoulli_hits(uint32_t n, double p, Rng& rng, Fn fn) {
    if (n == 0 || p <= 0.0) return;
    if (p >= 1.0) {
        for (uint32_t i = 0; i < n; ++i) fn(i);
        return;
    }
    double log1mp = std::log1p(-p);
    uint64_t i = 0;
    for (;;) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        i += static_cast<uint64_t>(std::floor(std::log(u) / log1mp));
        if (i >= n) return;
        fn(static_cast<uint32_t>(i));
        ++i;
    }
}

std::string paper_id_of(uint32_t gidx) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%06u", gidx);
    return buf;
}

std::vector<float> unit_vector(uint32_t dim, Rng& rng) {
    std::vector<float> v(dim);
    double norm2 = 0;
    for (uint32_t d = 0; d < dim; ++d) {
        double x = rng.normal();
        v[d] = static_cast<float>(x);
        norm2 += x * x;
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x = static_cast<float>(x * inv);
    return v;
}

}  // namespace

community::Partition PlantedTruth::to_partition(community::Level level) const {
    community::Partition p;
    p.level = level;
    p.ids = ids;
    p.labels = level == community::Level::L1 ? l1_true : l2_true;
    // Truth labels are dense by construction (every (l1,l2) block is
    // populated), but guard against empty just in case.
    p.n_communities =
        p.labels.empty() ? 0 : *std::max_element(p.labels.begin(), p.labels.end()) + 1;
    return p;
}

PlantedBundle generate(const PlantedSpec& spec) {
    spec.validate();
    PlantedBundle bundle;
    const uint32_t n = spec.n_papers();
    const uint32_t l2_total = spec.n_l1 * spec.l2_per_l1;
    const uint32_t dim = spec.embedding.dim;

    // Orphan flags: floor((i+1)*frac) > floor(i*frac) spreads orphans
    // evenly and gives exactly floor(n*frac) of them.
    std::vector<bool> orphan(n, false);
    for (uint32_t i = 0; i < n; ++i) {
        double lo = std::floor(static_cast<double>(i) * spec.orphan_frac);
        double hi = std::floor(static_cast<double>(i + 1) * spec.orphan_frac);
        orphan[i] = hi > lo;
    }

    // L1 centroids and L2 offsets.
    std::vector<std::vector<float>> centroid(spec.n_l1), offset(l2_total);
    for (uint32_t g = 0; g < spec.n_l1; ++g) {
        Rng rng(derive_seed(spec.seed, "l1vec", g));
        centroid[g] = unit_vector(dim, rng);
    }
    for (uint32_t c = 0; c < l2_total; ++c) {
        Rng rng(derive_seed(spec.seed, "l2vec", c));
        offset[c] = unit_vector(dim, rng);
    }

    std::vector<std::string> vec_ids;
    std::vector<float> vec_data;
    vec_ids.reserve(n);
    vec_data.reserve(static_cast<size_t>(n) * dim);

    bundle.truth.ids.reserve(n);
    bundle.truth.l1_true.reserve(n);
    bundle.truth.l2_true.reserve(n);

    for (uint32_t gidx = 0; gidx < n; ++gidx) {
        const uint32_t l2_global = gidx / spec.papers_per_l2;
        const uint32_t l1 = l2_global / spec.l2_per_l1;
        const uint32_t within = gidx % spec.papers_per_l2;
        Rng rng(derive_seed(spec.seed, "paper", gidx));

        corpus::PaperRecord rec;
        rec.paper_id = paper_id_of(gidx);
        rec.doi = "10.5555/" + rec.paper_id;
        rec.domain = "d" + std::to_string(l1 % spec.n_domains);
        rec.venue = "venue" + std::to_string(l1);
        rec.type = "article";
        rec.source = "synth";
        rec.year = 2010 + static_cast<int>(gidx % 12);
        rec.authors = {"author " + std::to_string(l2_global) + "-" + std::to_string(within)};

        // Text: topic tokens always; agenda tokens with p_agenda_in_text;
        // sibling-agenda leak with p_agenda_leak; filler fills out length.
        std::string title;
        for (uint32_t k = 0; k < spec.text.topic_tokens_per_l1; ++k) {
            if (k) title += ' ';
            title += "topic" + std::to_string(l1) + "w" + std::to_string(k);
        }
        rec.title = title.empty() ? "untitled" : title;
        std::string abstract;
        auto append_tok = [&abstract](const std::string& tok) {
            if (!abstract.empty()) abstract += ' ';
            abstract += tok;
        };
        auto agenda_tok = [&](uint32_t l2g, uint32_t k) {
            return "agenda" + std::to_string(l2g) + "w" + std::to_string(k);
        };
        for (uint32_t k = 0; k < spec.text.agenda_tokens_per_l2; ++k)
            if (rng.bernoulli(spec.text.p_agenda_in_text)) append_tok(agenda_tok(l2_global, k));
        if (spec.text.p_agenda_leak > 0) {
            for (uint32_t s = 0; s < spec.l2_per_l1; ++s) {
                uint32_t sibling = l1 * spec.l2_per_l1 + s;
                if (sibling == l2_global) continue;
                for (uint32_t k = 0; k < spec.text.agenda_tokens_per_l2; ++k)
                    if (rng.bernoulli(spec.text.p_agenda_leak)) append_tok(agenda_tok(sibling, k));
            }
        }
        uint32_t filler_count = spec.text.filler_tokens_per_doc +
                                static_cast<uint32_t>(rng.below(spec.text.filler_jitter + 1));
        for (uint32_t k = 0; k < filler_count; ++k)
            append_tok("filler" + std::to_string(rng.below(spec.text.filler_vocab)));
        rec.abstract = abstract;

        if (!orphan[gidx]) {
            // Shared reference pools, disjoint per level.
            bernoulli_hits(spec.ref_pool_l2, spec.p_ref_in_l2, rng, [&](uint32_t k) {
                rec.references.push_back("r2_" + std::to_string(l2_global) + "_" +
                                         std::to_string(k));
            });
            bernoulli_hits(spec.ref_pool_l1, spec.p_ref_in_l1, rng, [&](uint32_t k) {
                rec.references.push_back("r1_" + std::to_string(l1) + "_" + std::to_string(k));
            });
            bernoulli_hits(spec.ref_pool_global, spec.p_ref_cross, rng, [&](uint32_t k) {
                rec.references.push_back("rg_" + std::to_string(k));
            });
            // Direct citations to earlier members; canonical papers of the
            // L2 attract extra mass.
            const uint32_t l2_base = l2_global * spec.papers_per_l2;
            for (uint32_t j = 0; j < within; ++j) {
                uint32_t target = l2_base + j;
                if (orphan[target]) continue;
                double p = spec.cite.p_cite_in_l2;
                if (j < spec.cite.canonical_per_l2)
                    p = 1.0 - (1.0 - p) * (1.0 - spec.cite.p_cite_canonical);
                if (rng.bernoulli(p)) rec.references.push_back(paper_id_of(target));
            }
            if (spec.cite.p_cite_in_l1 > 0) {
                const uint32_t l1_base = l1 * spec.l2_per_l1 * spec.papers_per_l2;
                bernoulli_hits(gidx - l1_base, spec.cite.p_cite_in_l1, rng, [&](uint32_t j) {
                    uint32_t target = l1_base + j;
                    if (orphan[target] || target / spec.papers_per_l2 == l2_global) return;
                    rec.references.push_back(paper_id_of(target));
                });
            }
            if (spec.cite.p_cite_cross > 0) {
                bernoulli_hits(gidx, spec.cite.p_cite_cross, rng, [&](uint32_t j) {
                    if (orphan[j]) return;
                    if (j / (spec.l2_per_l1 * spec.papers_per_l2) == l1) return;
                    rec.references.push_back(paper_id_of(j));
                });
            }
            std::sort(rec.references.begin(), rec.references.end());
            rec.references.erase(std::unique(rec.references.begin(), rec.references.end()),
                                 rec.references.end());
        }

        // Toy embedding: L1 centroid + scaled L2 offset + noise, normalized.
        {
            std::vector<double> v(dim);
            for (uint32_t d = 0; d < dim; ++d)
                v[d] = spec.embedding.l1_scale * centroid[l1][d] +
                       spec.embedding.l2_scale * offset[l2_global][d];
            if (spec.embedding.noise_sigma > 0)
                for (uint32_t d = 0; d < dim; ++d)
                    v[d] += spec.embedding.noise_sigma * rng.normal();
            double norm2 = 0;
            for (double x : v) norm2 += x * x;
            double inv = 1.0 / std::sqrt(norm2);
            vec_ids.push_back(rec.paper_id);
            for (uint32_t d = 0; d < dim; ++d)
                vec_data.push_back(static_cast<float>(v[d] * inv));
        }

        bundle.truth.ids.push_back(rec.paper_id);
        bundle.truth.l1_true.push_back(l1);
        bundle.truth.l2_true.push_back(l2_global);
        if (orphan[gidx]) bundle.truth.orphan_ids.push_back(rec.paper_id);

        // Twin records for the dedup tests: same DOI, shorter abstract,
        // different source; ingest must merge them away.
        if (gidx < spec.planted_duplicates) {
            corpus::PaperRecord twin = rec;
            twin.paper_id = "dup_" + rec.paper_id;
            twin.abstract = rec.abstract.substr(0, rec.abstract.size() / 2);
            twin.source = "synth-alt";
            twin.references.resize(twin.references.size() / 2);
            bundle.truth.duplicate_ids.push_back(twin.paper_id);
            bundle.records.push_back(std::move(twin));
        }
        bundle.records.push_back(std::move(rec));
    }

    // External citers, concentrated within one L2 each.
    for (uint32_t c = 0; c < l2_total; ++c) {
        const uint32_t l2_base = c * spec.papers_per_l2;
        for (uint32_t j = 0; j < spec.citer.citers_per_l2; ++j) {
            Rng rng(derive_seed(spec.seed, "citer", c * spec.citer.citers_per_l2 + j));
            graph::CiterRow row;
            row.citer_id = "c" + std::to_string(c) + "_" + std::to_string(j);
            bernoulli_hits(spec.papers_per_l2, spec.citer.p_cite_member, rng, [&](uint32_t k) {
                if (!orphan[l2_base + k]) row.cited_member_ids.push_back(paper_id_of(l2_base + k));
            });
            if (!row.cited_member_ids.empty()) bundle.citers.push_back(std::move(row));
        }
    }

    // Agenda queries cycle over the L2 blocks; representatives are the
    // first non-orphan members, which pins every query's planted answer.
    std::vector<std::string> qvec_ids;
    std::vector<float> qvec_data;
    for (uint32_t q = 0; q < spec.n_queries; ++q) {
        uint32_t l2_global = q % l2_total;
        uint32_t l1 = l2_global / spec.l2_per_l1;
        retrieval::AgendaQuery query;
        char qid[16];
        std::snprintf(qid, sizeof(qid), "q%03u", q);
        query.query_id = qid;
        query.domain = "d" + std::to_string(l1 % spec.n_domains);
        std::string desc;
        if (spec.text.query_topic_tokens) {
            for (uint32_t k = 0; k < spec.text.topic_tokens_per_l1; ++k) {
                if (!desc.empty()) desc += ' ';
                desc += "topic" + std::to_string(l1) + "w" + std::to_string(k);
            }
        }
        for (uint32_t k = 0; k < spec.text.agenda_tokens_per_l2; ++k) {
            if (!desc.empty()) desc += ' ';
            desc += "agenda" + std::to_string(l2_global) + "w" + std::to_string(k);
        }
        query.description = desc;
        const uint32_t l2_base = l2_global * spec.papers_per_l2;
        for (uint32_t k = 0; k < spec.papers_per_l2 &&
                             query.representative_ids.size() < spec.reps_per_query;
             ++k) {
            if (!orphan[l2_base + k]) query.representative_ids.push_back(paper_id_of(l2_base + k));
        }
        if (query.representative_ids.empty())
            throw std::invalid_argument("planted query has no non-orphan representatives");

        // Query vector: what an oracle embedder would produce from the
        // description -- near the agenda centroid, with its own noise knob.
        Rng qrng(derive_seed(spec.seed, "qvec", q));
        std::vector<double> v(dim);
        for (uint32_t d = 0; d < dim; ++d)
            v[d] = spec.embedding.l1_scale * centroid[l1][d] +
                   spec.embedding.l2_scale * offset[l2_global][d];
        if (spec.embedding.query_noise_sigma > 0)
            for (uint32_t d = 0; d < dim; ++d)
                v[d] += spec.embedding.query_noise_sigma * qrng.normal();
        double norm2 = 0;
        for (double x : v) norm2 += x * x;
        double inv = 1.0 / std::sqrt(norm2);
        qvec_ids.push_back(query.query_id);
        for (uint32_t d = 0; d < dim; ++d) qvec_data.push_back(static_cast<float>(v[d] * inv));

        bundle.truth.queries.push_back(std::move(query));
    }
    bundle.query_vectors =
        embeddings::EmbeddingSet("synth-query", dim, std::move(qvec_ids), std::move(qvec_data));

    bundle.vectors =
        embeddings::EmbeddingSet("synth-toy", dim, std::move(vec_ids), std::move(vec_data));
    bundle.store = corpus::ingest(bundle.records).store;
    return bundle;
}

double adjusted_rand_index(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("adjusted_rand_index: labelings differ in size");
    const double n = static_cast<double>(a.size());
    if (a.empty()) return 1.0;
    std::map<std::pair<uint32_t, uint32_t>, uint64_t> contingency;
    std::map<uint32_t, uint64_t> row, col;
    for (size_t i = 0; i < a.size(); ++i) {
        ++contingency[{a[i], b[i]}];
        ++row[a[i]];
        ++col[b[i]];
    }
    auto choose2 = [](uint64_t m) {
        return static_cast<double>(m) * (static_cast<double>(m) - 1.0) / 2.0;
    };
    double sum_ij = 0, sum_a = 0, sum_b = 0;
    for (const auto& [key, m] : contingency) sum_ij += choose2(m);
    for (const auto& [key, m] : row) sum_a += choose2(m);
    for (const auto& [key, m] : col) sum_b += choose2(m);
    double total = choose2(static_cast<uint64_t>(n));
    double expected = sum_a * sum_b / total;
    double max_index = 0.5 * (sum_a + sum_b);
    double denom = max_index - expected;
    if (denom == 0.0) return sum_ij == expected ? 1.0 : 0.0;
    return (sum_ij - expected) / denom;
}

double adjusted_rand_index(const community::Partition& a, const community::Partition& b) {
    if (a.ids != b.ids) throw InputError("adjusted_rand_index: partitions cover different ids");
    return adjusted_rand_index(a.labels, b.labels);
}

void write_truth_json(const std::string& path, const PlantedTruth& truth) {
    io::atomic_write(path, [&](std::ostream& out) {
        ordered_json j;
        ordered_json labels = ordered_json::object();
        for (size_t i = 0; i < truth.ids.size(); ++i)
            labels[truth.ids[i]] = ordered_json::array({truth.l1_true[i], truth.l2_true[i]});
        j["labels"] = labels;
        j["duplicates"] = truth.duplicate_ids;
        j["orphans"] = truth.orphan_ids;
        ordered_json queries = ordered_json::array();
        for (const auto& q : truth.queries) {
            ordered_json qj;
            qj["query_id"] = q.query_id;
            qj["domain"] = q.domain;
            qj["description"] = q.description;
            qj["representative_ids"] = q.representative_ids;
            queries.push_back(qj);
        }
        j["queries"] = queries;
        out << j.dump(2) << '\n';
    });
}

}  // namespace citegraph::synth
