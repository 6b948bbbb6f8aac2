#include "citegraph/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "citegraph/common/error.hpp"
#include "citegraph/common/io.hpp"
#include "citegraph/common/text.hpp"

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace citegraph::retrieval {

std::vector<AgendaQuery> read_queries_jsonl(const std::string& path) {
    std::vector<AgendaQuery> out;
    io::for_each_line(path, [&](size_t n, std::string_view line) {
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError(path + ":" + std::to_string(n) + ": " + e.what());
        }
        AgendaQuery q;
        q.query_id = j.at("query_id").get<std::string>();
        q.domain = j.at("domain").get<std::string>();
        q.description = j.at("description").get<std::string>();
        for (const auto& r : j.at("representative_ids"))
            q.representative_ids.push_back(r.get<std::string>());
        if (q.representative_ids.empty())
            throw InputError(path + ":" + std::to_string(n) + ": query " + q.query_id +
                             " has no representative ids");
        out.push_back(std::move(q));
    });
    return out;
}

void write_queries_jsonl(const std::string& path, const std::vector<AgendaQuery>& queries) {
    io::atomic_write(path, [&](std::ostream& out) {
        for (const auto& q : queries) {
            ordered_json j;
            j["query_id"] = q.query_id;
            j["domain"] = q.domain;
            j["description"] = q.description;
            j["representative_ids"] = q.representative_ids;
            out << j.dump() << '\n';
        }
    });
}

void write_runs_jsonl(const std::string& path, const std::vector<RetrievalRun>& runs) {
    io::atomic_write(path, [&](std::ostream& out) {
        for (const auto& run : runs) {
            out << "{\"query_id\":" << json(run.query_id).dump()
                << ",\"retriever\":" << json(run.retriever).dump() << ",\"ranked\":[";
            for (size_t i = 0; i < run.ranked.size(); ++i) {
                if (i) out << ',';
                out << "{\"id\":" << json(run.ranked[i].id).dump()
                    << ",\"score\":" << io::format_double(run.ranked[i].score) << '}';
            }
            out << "]}\n";
        }
    });
}

std::vector<RetrievalRun> read_runs_jsonl(const std::string& path) {
    std::vector<RetrievalRun> out;
    io::for_each_line(path, [&](size_t n, std::string_view line) {
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError(path + ":" + std::to_string(n) + ": " + e.what());
        }
        RetrievalRun run;
        run.query_id = j.at("query_id").get<std::string>();
        run.retriever = j.at("retriever").get<std::string>();
        for (const auto& r : j.at("ranked"))
            run.ranked.push_back({r.at("id").get<std::string>(), r.at("score").get<double>()});
        out.push_back(std::move(run));
    });
    return out;
}

Bm25Index::Bm25Index(boolquery::InvertedIndex index, Bm25Params params)
    : index_(std::move(index)), params_(params) {}

Bm25Index bm25_index(const corpus::CorpusStore& store, Bm25Params params) {
    if (store.size() == 0) throw InputError("bm25_index: empty corpus");
    return Bm25Index(boolquery::InvertedIndex::build(store), params);
}

RetrievalRun Bm25Index::search(const std::string& query_text, size_t top_n,
                               const std::string& domain) const {
    auto [begin, end] = index_.domain_range(domain);
    RetrievalRun run;
    run.retriever = "bm25";
    if (begin == end || top_n == 0) return run;

    std::vector<std::string> terms = text::tokenize(query_text);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

    const double n_docs = static_cast<double>(end - begin);
    const double avgdl =
        static_cast<double>(index_.total_length_in_range(begin, end)) / n_docs;

    std::unordered_map<uint32_t, double> scores;
    for (const auto& term : terms) {
        const auto* plist = index_.postings(term);
        if (!plist) continue;
        size_t df = index_.df_in_range(term, begin, end);
        if (df == 0) continue;
        double idf = std::log(1.0 + (n_docs - static_cast<double>(df) + 0.5) /
                                        (static_cast<double>(df) + 0.5));
        auto lo = std::lower_bound(
            plist->begin(), plist->end(), begin,
            [](const boolquery::Posting& p, uint32_t d) { return p.doc < d; });
        for (auto it = lo; it != plist->end() && it->doc < end; ++it) {
            double tf = static_cast<double>(it->positions.size());
            double dl = static_cast<double>(index_.doc_length(it->doc));
            double denom = tf + params_.k1 * (1.0 - params_.b + params_.b * dl / avgdl);
            scores[it->doc] += idf * tf * (params_.k1 + 1.0) / denom;
        }
    }

    std::vector<std::pair<uint32_t, double>> hits(scores.begin(), scores.end());
    std::sort(hits.begin(), hits.end(), [&](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return index_.doc_id(x.first) < index_.doc_id(y.first);
    });
    if (hits.size() > top_n) hits.resize(top_n);
    run.ranked.reserve(hits.size());
    for (const auto& [doc, score] : hits) run.ranked.push_back({index_.doc_id(doc), score});
    return run;
}

RetrievalRun cosine_search(const embeddings::EmbeddingSet& set,
                           const std::vector<float>& query_vector,
                           const std::vector<std::string>& pool, size_t top_n) {
    if (query_vector.size() != set.dim())
        throw std::invalid_argument("query vector dimension " +
                                    std::to_string(query_vector.size()) + " != set dimension " +
                                    std::to_string(set.dim()));
    std::vector<std::string> pool_ids(pool);
    std::sort(pool_ids.begin(), pool_ids.end());
    pool_ids.erase(std::unique(pool_ids.begin(), pool_ids.end()), pool_ids.end());

    std::vector<std::pair<double, size_t>> scored;  // (cos, pool index)
    scored.reserve(pool_ids.size());
    for (size_t i = 0; i < pool_ids.size(); ++i) {
        const float* v = set.vector_of(pool_ids[i]);
        double dot = 0;
        for (uint32_t d = 0; d < set.dim(); ++d)
            dot += static_cast<double>(query_vector[d]) * static_cast<double>(v[d]);
        scored.emplace_back(dot, i);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;
    });
    if (scored.size() > top_n) scored.resize(top_n);
    RetrievalRun run;
    run.retriever = "cosine:" + set.model_name();
    for (const auto& [cos, i] : scored) run.ranked.push_back({pool_ids[i], cos});
    return run;
}

CitationIndex CitationIndex::build(const corpus::CorpusStore& store, const IdInterner& members) {
    CitationIndex idx;
    idx.members_ = members;
    idx.out_.resize(members.size());
    for (const auto& rec : store.records()) {
        int64_t a = members.find(rec.paper_id);
        if (a < 0) continue;
        for (const auto& ref : rec.references) {
            if (ref == rec.paper_id) continue;
            int64_t b = members.find(ref);
            if (b >= 0) idx.out_[static_cast<size_t>(a)].push_back(static_cast<uint32_t>(b));
        }
        auto& refs = idx.out_[static_cast<size_t>(a)];
        std::sort(refs.begin(), refs.end());
        refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
    }
    return idx;
}

const std::vector<uint32_t>& CitationIndex::out_refs(const std::string& id) const {
    int64_t i = members_.find(id);
    return i < 0 ? empty_ : out_[static_cast<size_t>(i)];
}

RetrievalRun internal_citation_rerank(const std::vector<std::string>& candidates,
                                      const CitationIndex& cites) {
    if (candidates.empty()) throw std::invalid_argument("rerank: empty candidate list");
    // Map member index -> candidate rank for the in-set test.
    std::unordered_map<uint32_t, size_t> member_rank;
    member_rank.reserve(candidates.size() * 2);
    for (size_t r = 0; r < candidates.size(); ++r) {
        int64_t m = cites.members().find(candidates[r]);
        if (m >= 0) member_rank.emplace(static_cast<uint32_t>(m), r);
    }
    std::vector<uint32_t> indeg(candidates.size(), 0);
    for (size_t r = 0; r < candidates.size(); ++r) {
        for (uint32_t cited : cites.out_refs(candidates[r])) {
            auto it = member_rank.find(cited);
            if (it != member_rank.end() && it->second != r) ++indeg[it->second];
        }
    }
    std::vector<size_t> order(candidates.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
        if (indeg[x] != indeg[y]) return indeg[x] > indeg[y];
        if (x != y) return x < y;  // original candidate rank
        return candidates[x] < candidates[y];
    });
    RetrievalRun run;
    run.retriever = "cite-rerank";
    run.ranked.reserve(candidates.size());
    for (size_t i : order)
        run.ranked.push_back({candidates[i], static_cast<double>(indeg[i])});
    return run;
}

RetrievalRun rrf_fuse(const std::vector<RetrievalRun>& runs, int k0, size_t top_n) {
    if (runs.size() < 2) throw std::invalid_argument("rrf_fuse: need at least 2 runs");
    if (k0 < 1) throw std::invalid_argument("rrf_fuse: k0 must be >= 1");
    std::unordered_map<std::string, double> scores;
    for (const auto& run : runs) {
        for (size_t r = 0; r < run.ranked.size(); ++r)
            scores[run.ranked[r].id] += 1.0 / (static_cast<double>(k0) + static_cast<double>(r + 1));
    }
    std::vector<std::pair<std::string, double>> fused(scores.begin(), scores.end());
    std::sort(fused.begin(), fused.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });
    if (top_n > 0 && fused.size() > top_n) fused.resize(top_n);
    RetrievalRun out;
    out.retriever = "rrf";
    if (!runs.empty()) out.query_id = runs.front().query_id;
    for (auto& [id, score] : fused) out.ranked.push_back({std::move(id), score});
    return out;
}

std::vector<std::string> StubStrategist::propose(const AgendaQuery& query) {
    std::vector<std::string> tokens = text::tokenize(query.description);
    std::vector<std::string> content;
    std::unordered_set<std::string> seen;
    for (const auto& tok : tokens) {
        if (text::is_stopword(tok) || seen.count(tok)) continue;
        seen.insert(tok);
        content.push_back(tok);
    }
    if (content.empty()) content = tokens;

    std::string narrow;
    for (size_t i = 0; i < content.size(); ++i) {
        if (i) narrow += " AND ";
        narrow += content[i];
    }
    std::vector<std::string> out;
    out.push_back(query.description);  // verbatim; may fail to parse and be skipped
    if (!narrow.empty() && narrow != query.description) out.push_back(narrow);
    return out;
}

AgentVerdict StubJudge::judge(const AgendaQuery&, const std::string& candidate_query,
                              const std::vector<std::string>&) {
    return {candidate_query, 1.0, "stub judge: accept"};
}

GraphRetrieveResult graph_retrieve(const AgendaQuery& query, Strategist& strategist, Judge& judge,
                                   const boolquery::InvertedIndex& index,
                                   const CitationIndex& cites, const corpus::CorpusStore& store,
                                   const std::vector<std::string>& pool,
                                   const GraphRetrieveParams& params) {
    GraphRetrieveResult result;
    std::vector<std::string> candidates = strategist.propose(query);
    if (candidates.empty()) throw InputError("strategist yielded no candidate queries");

    std::vector<RetrievalRun> reranked(candidates.size());
    for (const auto& cand : candidates) {
        CandidateReport report;
        report.query = cand;
        boolquery::QueryAst ast;
        try {
            ast = boolquery::parse_query(cand);
            report.parsed = true;
        } catch (const boolquery::ParseError&) {
            result.candidates.push_back(std::move(report));
            continue;  // unparsable candidates are skipped, reported
        }
        std::vector<std::string> matches = boolquery::evaluate(ast, index, query.domain);
        report.result_size = matches.size();
        RetrievalRun run;
        if (!matches.empty()) run = internal_citation_rerank(matches, cites);

        std::vector<std::string> titles;
        for (size_t i = 0; i < run.ranked.size() && i < params.judge_sample; ++i) {
            const auto* rec = store.find(run.ranked[i].id);
            titles.push_back(rec ? rec->title : run.ranked[i].id);
        }
        AgentVerdict verdict = judge.judge(query, cand, titles);
        if (verdict.relevance_score < 0.0 || verdict.relevance_score > 1.0)
            throw InputError("judge returned a relevance score outside [0,1]");
        report.score = verdict.relevance_score;
        report.passed = verdict.relevance_score >= params.threshold;
        reranked[result.candidates.size()] = std::move(run);
        result.candidates.push_back(std::move(report));
    }

    // Among passing candidates pick the largest result set; ties keep the
    // earliest candidate in strategist order.
    int64_t best = -1;
    for (size_t i = 0; i < result.candidates.size(); ++i) {
        const auto& rep = result.candidates[i];
        if (!rep.parsed || !rep.passed) continue;
        if (best < 0 || rep.result_size > result.candidates[static_cast<size_t>(best)].result_size)
            best = static_cast<int64_t>(i);
    }
    if (best < 0) {
        result.status = GraphRetrieveStatus::no_passing_candidate;
        return result;
    }

    std::unordered_set<std::string> pool_set(pool.begin(), pool.end());
    const RetrievalRun& winner = reranked[static_cast<size_t>(best)];
    RetrievalRun out;
    out.query_id = query.query_id;
    out.retriever = "graph";
    if (params.intersect_before_cut) {
        for (const auto& doc : winner.ranked) {
            if (out.ranked.size() >= params.candidate_cut) break;
            if (pool_set.count(doc.id)) out.ranked.push_back(doc);
        }
    } else {
        for (size_t i = 0; i < winner.ranked.size() && i < params.candidate_cut; ++i)
            if (pool_set.count(winner.ranked[i].id)) out.ranked.push_back(winner.ranked[i]);
    }
    result.status = GraphRetrieveStatus::ok;
    result.run = std::move(out);
    return result;
}

Top1Outcome eval_top1_l2(const RetrievalRun& run, const AgendaQuery& query,
                         const community::Partition& l2) {
    if (run.ranked.empty()) return Top1Outcome::empty_run;
    std::unordered_set<uint32_t> rep_labels;
    for (const auto& rep : query.representative_ids) {
        int64_t l = l2.find_label(rep);
        if (l < 0) throw InputError("representative paper has no L2 label: " + rep);
        rep_labels.insert(static_cast<uint32_t>(l));
    }
    int64_t top = l2.find_label(run.ranked.front().id);
    if (top < 0) return Top1Outcome::miss;  // unlabeled rank-1 cannot share a community
    return rep_labels.count(static_cast<uint32_t>(top)) ? Top1Outcome::hit : Top1Outcome::miss;
}

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
    io::atomic_write(path, [&](std::ostream& out) {
        out << "retriever,domain,top1_l2_rate,n_queries,n_empty\n";
        for (const auto& r : rows)
            out << r.retriever << ',' << r.domain << ',' << io::format_9sig(r.top1_l2_rate) << ','
                << r.n_queries << ',' << r.n_empty << '\n';
    });
}

}  // namespace citegraph::retrieval
