#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "citegraph/community.hpp"
#include "citegraph/corpus.hpp"
#include "citegraph/embeddings.hpp"
#include "citegraph/graph.hpp"
#include "citegraph/retrieval.hpp"

namespace citegraph::synth {

struct TextSpec {
    uint32_t topic_tokens_per_l1 = 6;   // in every member's text
    uint32_t agenda_tokens_per_l2 = 4;
    uint32_t filler_vocab = 400;
    uint32_t filler_tokens_per_doc = 30;
    uint32_t filler_jitter = 0;     // uniform extra filler, varies doc length
    double p_agenda_in_text = 1.0;  // < 1 suppresses the L2 signal in text
    double p_agenda_leak = 0.0;     // carry a sibling agenda's token
    bool query_topic_tokens = true; // include topic tokens in query descriptions
};

struct CitationSpec {
    double p_cite_in_l2 = 0.2;   // cite an earlier same-L2 member
    double p_cite_in_l1 = 0.0;   // cite an earlier same-L1, other-L2 member
    double p_cite_cross = 0.0;
    uint32_t canonical_per_l2 = 3;   // early members attracting extra citations
    double p_cite_canonical = 0.0;
};

struct CiterSpec {
    uint32_t citers_per_l2 = 20;
    double p_cite_member = 0.3;
};

struct EmbeddingSpec {
    uint32_t dim = 64;
    double l1_scale = 1.0;
    double l2_scale = 0.6;
    double noise_sigma = 0.1;
    double query_noise_sigma = 0.1;  // noise on planted query vectors
};

// Two-level planted corpus: references draw from disjoint per-L2, per-L1
// and global pools so that expected bibliographic-coupling overlap is
// strictly ordered within-L2 > within-L1 > cross-L1.
struct PlantedSpec {
    uint32_t n_l1 = 4;
    uint32_t l2_per_l1 = 3;
    uint32_t papers_per_l2 = 40;
    double p_ref_in_l2 = 0.5;
    double p_ref_in_l1 = 0.1;
    double p_ref_cross = 0.02;
    uint32_t ref_pool_l2 = 40;
    uint32_t ref_pool_l1 = 60;
    uint32_t ref_pool_global = 100;
    uint32_t n_domains = 2;  // L1 g belongs to domain "d" + (g % n_domains)
    TextSpec text;
    CitationSpec cite;
    CiterSpec citer;
    EmbeddingSpec embedding;
    uint32_t n_queries = 0;
    uint32_t reps_per_query = 3;
    uint32_t planted_duplicates = 0;  // twin records merged away by ingest
    double orphan_frac = 0.0;         // papers with no graph tie at all
    uint64_t seed = 1;

    uint32_t n_papers() const { return n_l1 * l2_per_l1 * papers_per_l2; }
    void validate() const;  // throws std::invalid_argument
};

struct PlantedTruth {
    std::vector<std::string> ids;  // sorted; excludes duplicate twins
    std::vector<uint32_t> l1_true;
    std::vector<uint32_t> l2_true;  // globally dense: l1 * l2_per_l1 + l2
    std::vector<std::string> duplicate_ids;
    std::vector<std::string> orphan_ids;
    std::vector<retrieval::AgendaQuery> queries;

    community::Partition to_partition(community::Level level) const;
};

struct PlantedBundle {
    std::vector<corpus::PaperRecord> records;  // raw stream, twins included
    corpus::CorpusStore store;                 // ingested view of `records`
    std::vector<graph::CiterRow> citers;
    embeddings::EmbeddingSet vectors;          // unit-normalized
    embeddings::EmbeddingSet query_vectors;    // one row per planted query
    PlantedTruth truth;
};

// Deterministic under spec.seed, byte-for-byte; every per-paper stream is
// derived by a counter scheme, so generation order is irrelevant.
PlantedBundle generate(const PlantedSpec& spec);

// Chance-corrected partition agreement via the contingency-table formula.
// Labelings are positional; both vectors must have the same length.
double adjusted_rand_index(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);

// Joins two partitions on their common ids. Throws InputError if the id
// sets differ.
double adjusted_rand_index(const community::Partition& a, const community::Partition& b);

void write_truth_json(const std::string& path, const PlantedTruth& truth);

}  // namespace citegraph::synth
