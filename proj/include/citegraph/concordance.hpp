#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "citegraph/community.hpp"
#include "citegraph/corpus.hpp"
#include "citegraph/embeddings.hpp"

namespace citegraph::concordance {

enum class RateMode { per_rank, cumulative };

struct RateResult {
    // k -> rate in [0, 1]
    std::map<uint32_t, double> rates;
    // k -> raw matching-slot count (per_rank: matches at rank k exactly;
    // cumulative: matches over ranks 1..k), for exact-identity checks
    std::map<uint32_t, uint64_t> match_counts;
    size_t n_queries = 0;
};

// Same-community rate of embedding neighbors against a partition.
// per_rank: fraction of queries whose k-th non-self neighbor shares the
// query's community. cumulative: mean fraction of matching slots among the
// k nearest. Throws InputError naming any unlabeled id.
RateResult same_rate(const embeddings::NeighborTable& neighbors,
                     const community::Partition& partition, const std::vector<uint32_t>& ks,
                     RateMode mode);

// Probability two uniformly random pool papers share a community:
// sum over communities of (share)^2. Throws on an empty pool.
double chance_baseline(const community::Partition& partition,
                       const std::vector<std::string>& pool);

// rate / baseline; throws std::invalid_argument on baseline <= 0.
double enrichment(double rate, double baseline);

struct ConcordanceReport {
    std::string model_name;
    std::string domain;
    std::string level;  // "L1" or "L2"
    std::map<uint32_t, double> per_rank;
    std::map<uint32_t, double> cumulative_topk;
    double baseline = 0.0;
    std::map<uint32_t, double> enrichment_cumulative;
    std::map<uint32_t, double> enrichment_per_rank;
    size_t n_queries = 0;
};

ConcordanceReport make_report(const std::string& model_name, const std::string& domain,
                              const std::string& level,
                              const embeddings::NeighborTable& neighbors,
                              const community::Partition& partition,
                              const std::vector<uint32_t>& ks);

void write_reports_json(const std::string& path, const std::vector<ConcordanceReport>& reports);
std::vector<ConcordanceReport> read_reports_json(const std::string& path);

// CSV rows (model,domain,level,k,mode,rate,baseline,enrichment,n_queries).
void write_reports_csv(const std::string& path, const std::vector<ConcordanceReport>& reports);

struct LexicalResult {
    std::map<std::string, double> by_domain;  // unweighted mean over L1 parents
    std::map<std::string, size_t> parents_by_domain;
    size_t skipped_single_child = 0;  // L1 parents with < 2 L2 children
};

// TF-IDF-weighted fraction of unigram mass that occurs in exactly one L2
// child of an L1 parent; tf * ln(N/df), 300-word stopword list, domain of
// a parent = majority domain of its papers.
LexicalResult lexical_distinctiveness(const corpus::CorpusStore& store,
                                      const community::Partition& l1,
                                      const community::Partition& l2);

}  // namespace citegraph::concordance
