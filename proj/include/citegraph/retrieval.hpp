#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "citegraph/boolquery.hpp"
#include "citegraph/community.hpp"
#include "citegraph/corpus.hpp"
#include "citegraph/embeddings.hpp"

namespace citegraph::retrieval {

struct AgendaQuery {
    std::string query_id;
    std::string domain;
    std::string description;
    std::vector<std::string> representative_ids;
};

struct ScoredDoc {
    std::string id;
    double score;
};

struct RetrievalRun {
    std::string query_id;
    std::string retriever;
    std::vector<ScoredDoc> ranked;  // scores non-increasing, ids unique
};

std::vector<AgendaQuery> read_queries_jsonl(const std::string& path);
void write_queries_jsonl(const std::string& path, const std::vector<AgendaQuery>& queries);
void write_runs_jsonl(const std::string& path, const std::vector<RetrievalRun>& runs);
std::vector<RetrievalRun> read_runs_jsonl(const std::string& path);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

// Okapi BM25 over title+abstract backed by the positional index; the same
// index serves the Boolean evaluator.
class Bm25Index {
  public:
    explicit Bm25Index(boolquery::InvertedIndex index, Bm25Params params = {});

    const boolquery::InvertedIndex& text_index() const { return index_; }
    const Bm25Params& params() const { return params_; }

    // idf = ln(1 + (N-df+0.5)/(df+0.5)) over the domain sub-index (or the
    // whole corpus for an empty domain). Ties break by ascending paper id.
    RetrievalRun search(const std::string& query_text, size_t top_n,
                        const std::string& domain = "") const;

  private:
    boolquery::InvertedIndex index_;
    Bm25Params params_;
};

Bm25Index bm25_index(const corpus::CorpusStore& store, Bm25Params params = {});

// Exact top-n cosine over the pool for an external query vector.
RetrievalRun cosine_search(const embeddings::EmbeddingSet& set,
                           const std::vector<float>& query_vector,
                           const std::vector<std::string>& pool, size_t top_n);

// Directed citation pairs among corpus members (who cites whom).
class CitationIndex {
  public:
    static CitationIndex build(const corpus::CorpusStore& store, const IdInterner& members);
    // out-references of `id` restricted to members; empty list if unknown.
    const std::vector<uint32_t>& out_refs(const std::string& id) const;
    const IdInterner& members() const { return members_; }

  private:
    IdInterner members_;
    std::vector<std::vector<uint32_t>> out_;  // member index -> cited member indexes
    std::vector<uint32_t> empty_;
};

// score(p) = number of other candidates that cite p directly; order by
// (score desc, original rank asc, id asc). Input order never changes
// scores, only tie resolution.
RetrievalRun internal_citation_rerank(const std::vector<std::string>& candidates,
                                      const CitationIndex& cites);

// Reciprocal rank fusion: score(d) = sum over runs of 1/(k0 + rank_run(d)),
// 1-based ranks, absent documents contribute nothing. Requires >= 2 runs.
RetrievalRun rrf_fuse(const std::vector<RetrievalRun>& runs, int k0 = 60, size_t top_n = 0);

struct AgentVerdict {
    std::string candidate_query;
    double relevance_score = 0.0;  // in [0, 1]
    std::string summary;
};

// Boolean-query portfolio provider (the paper pipeline runs an LLM here;
// the default is a deterministic stub).
class Strategist {
  public:
    virtual ~Strategist() = default;
    virtual std::vector<std::string> propose(const AgendaQuery& query) = 0;
    virtual bool serial() const { return false; }  // true = no concurrent calls
};

// Candidate judge: scores a candidate query from the titles of its top
// reranked hits.
class Judge {
  public:
    virtual ~Judge() = default;
    virtual AgentVerdict judge(const AgendaQuery& query, const std::string& candidate_query,
                               const std::vector<std::string>& top_titles) = 0;
    virtual bool serial() const { return false; }
};

// Deterministic stub: the description verbatim plus its content words
// AND-ed.
class StubStrategist : public Strategist {
  public:
    std::vector<std::string> propose(const AgendaQuery& query) override;
};

// Deterministic stub: accepts everything with score 1.0.
class StubJudge : public Judge {
  public:
    AgentVerdict judge(const AgendaQuery& query, const std::string& candidate_query,
                       const std::vector<std::string>& top_titles) override;
};

struct GraphRetrieveParams {
    double threshold = 0.8;
    size_t judge_sample = 10;    // titles shown to the judge
    size_t candidate_cut = 1000; // top-N by citation count from the winner
    bool intersect_before_cut = false;
};

struct CandidateReport {
    std::string query;
    bool parsed = false;
    size_t result_size = 0;
    double score = 0.0;
    bool passed = false;
};

enum class GraphRetrieveStatus { ok, no_passing_candidate };

struct GraphRetrieveResult {
    GraphRetrieveStatus status = GraphRetrieveStatus::no_passing_candidate;
    RetrievalRun run;
    std::vector<CandidateReport> candidates;
};

// The Boolean-portfolio retriever: evaluate each candidate (domain
// restricted), citation-rerank its result set, judge the top titles, pick
// the largest passing result set, cut to candidate_cut by citation count
// and intersect with the pool.
GraphRetrieveResult graph_retrieve(const AgendaQuery& query, Strategist& strategist, Judge& judge,
                                   const boolquery::InvertedIndex& index,
                                   const CitationIndex& cites, const corpus::CorpusStore& store,
                                   const std::vector<std::string>& pool,
                                   const GraphRetrieveParams& params = {});

enum class Top1Outcome { hit, miss, empty_run };

// True hit iff the rank-1 paper's L2 community equals the L2 of at least
// one representative. An empty run reports separately and counts as a miss.
Top1Outcome eval_top1_l2(const RetrievalRun& run, const AgendaQuery& query,
                         const community::Partition& l2);

struct BenchRow {
    std::string retriever;
    std::string domain;
    double top1_l2_rate = 0.0;
    size_t n_queries = 0;
    size_t n_empty = 0;
};

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows);

}  // namespace citegraph::retrieval
