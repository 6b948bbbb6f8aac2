#include "citegraph/concordance.hpp"

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

namespace citegraph::concordance {

RateResult same_rate(const embeddings::NeighborTable& neighbors,
                     const community::Partition& partition, const std::vector<uint32_t>& ks,
                     RateMode mode) {
    if (neighbors.pool_ids.empty()) throw InputError("empty neighbor table");
    for (uint32_t k : ks) {
        if (k == 0 || k > neighbors.k_max)
            throw std::invalid_argument("rank " + std::to_string(k) +
                                        " outside the neighbor table (k_max " +
                                        std::to_string(neighbors.k_max) + ")");
    }

    // Resolve labels once; pool indexes are shared across rows.
    std::vector<uint32_t> label(neighbors.pool_ids.size());
    for (size_t i = 0; i < neighbors.pool_ids.size(); ++i) {
        int64_t l = partition.find_label(neighbors.pool_ids[i]);
        if (l < 0) throw InputError("no community label for id " + neighbors.pool_ids[i]);
        label[i] = static_cast<uint32_t>(l);
    }

    const size_t n = neighbors.pool_ids.size();
    RateResult result;
    result.n_queries = n;
    for (uint32_t k : ks) {
        uint64_t matches = 0;
        if (mode == RateMode::per_rank) {
            for (size_t q = 0; q < n; ++q)
                if (label[neighbors.row(q)[k - 1].pool_index] == label[q]) ++matches;
            result.match_counts[k] = matches;
            result.rates[k] = static_cast<double>(matches) / static_cast<double>(n);
        } else {
            for (size_t q = 0; q < n; ++q) {
                const embeddings::Neighbor* row = neighbors.row(q);
                for (uint32_t r = 0; r < k; ++r)
                    if (label[row[r].pool_index] == label[q]) ++matches;
            }
            result.match_counts[k] = matches;
            result.rates[k] =
                static_cast<double>(matches) / (static_cast<double>(n) * static_cast<double>(k));
        }
    }
    return result;
}

double chance_baseline(const community::Partition& partition,
                       const std::vector<std::string>& pool) {
    if (pool.empty()) throw InputError("chance_baseline: empty pool");
    std::unordered_map<uint32_t, uint64_t> counts;
    for (const auto& id : pool) {
        int64_t l = partition.find_label(id);
        if (l < 0) throw InputError("no community label for id " + id);
        ++counts[static_cast<uint32_t>(l)];
    }
    double b = 0;
    double n = static_cast<double>(pool.size());
    for (const auto& [c, cnt] : counts) {
        double rho = static_cast<double>(cnt) / n;
        b += rho * rho;
    }
    return b;
}

double enrichment(double rate, double baseline) {
    if (baseline <= 0) throw std::invalid_argument("enrichment: baseline must be positive");
    return rate / baseline;
}

ConcordanceReport make_report(const std::string& model_name, const std::string& domain,
                              const std::string& level,
                              const embeddings::NeighborTable& neighbors,
                              const community::Partition& partition,
                              const std::vector<uint32_t>& ks) {
    ConcordanceReport report;
    report.model_name = model_name;
    report.domain = domain;
    report.level = level;
    RateResult pr = same_rate(neighbors, partition, ks, RateMode::per_rank);
    RateResult cum = same_rate(neighbors, partition, ks, RateMode::cumulative);
    report.per_rank = pr.rates;
    report.cumulative_topk = cum.rates;
    report.n_queries = pr.n_queries;
    report.baseline = chance_baseline(partition, neighbors.pool_ids);
    for (const auto& [k, rate] : report.cumulative_topk)
        report.enrichment_cumulative[k] = enrichment(rate, report.baseline);
    for (const auto& [k, rate] : report.per_rank)
        report.enrichment_per_rank[k] = enrichment(rate, report.baseline);
    return report;
}

namespace {

ordered_json rates_to_json(const std::map<uint32_t, double>& rates) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : rates) j[std::to_string(k)] = v;
    return j;
}

std::map<uint32_t, double> rates_from_json(const json& j) {
    std::map<uint32_t, double> out;
    for (auto it = j.begin(); it != j.end(); ++it)
        out[static_cast<uint32_t>(std::stoul(it.key()))] = it.value().get<double>();
    return out;
}

}  // namespace

void write_reports_json(const std::string& path, const std::vector<ConcordanceReport>& reports) {
    io::atomic_write(path, [&](std::ostream& out) {
        ordered_json arr = ordered_json::array();
        for (const auto& r : reports) {
            ordered_json j;
            j["model"] = r.model_name;
            j["domain"] = r.domain;
            j["level"] = r.level;
            j["per_rank"] = rates_to_json(r.per_rank);
            j["cumulative_topk"] = rates_to_json(r.cumulative_topk);
            j["baseline"] = r.baseline;
            j["enrichment_cumulative"] = rates_to_json(r.enrichment_cumulative);
            j["enrichment_per_rank"] = rates_to_json(r.enrichment_per_rank);
            j["n_queries"] = r.n_queries;
            arr.push_back(j);
        }
        out << arr.dump(2) << '\n';
    });
}

std::vector<ConcordanceReport> read_reports_json(const std::string& path) {
    json arr;
    try {
        arr = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    std::vector<ConcordanceReport> out;
    for (const auto& j : arr) {
        ConcordanceReport r;
        r.model_name = j.at("model").get<std::string>();
        r.domain = j.at("domain").get<std::string>();
        r.level = j.at("level").get<std::string>();
        r.per_rank = rates_from_json(j.at("per_rank"));
        r.cumulative_topk = rates_from_json(j.at("cumulative_topk"));
        r.baseline = j.at("baseline").get<double>();
        r.enrichment_cumulative = rates_from_json(j.at("enrichment_cumulative"));
        r.enrichment_per_rank = rates_from_json(j.at("enrichment_per_rank"));
        r.n_queries = j.at("n_queries").get<size_t>();
        out.push_back(std::move(r));
    }
    return out;
}

void write_reports_csv(const std::string& path, const std::vector<ConcordanceReport>& reports) {
    io::atomic_write(path, [&](std::ostream& out) {
        out << "model,domain,level,k,mode,rate,baseline,enrichment,n_queries\n";
        for (const auto& r : reports) {
            auto emit = [&](uint32_t k, const char* mode, double rate, double enr) {
                out << r.model_name << ',' << r.domain << ',' << r.level << ',' << k << ','
                    << mode << ',' << io::format_9sig(rate) << ',' << io::format_9sig(r.baseline)
                    << ',' << io::format_9sig(enr) << ',' << r.n_queries << '\n';
            };
            for (const auto& [k, rate] : r.per_rank)
                emit(k, "per_rank", rate, r.enrichment_per_rank.at(k));
            for (const auto& [k, rate] : r.cumulative_topk)
                emit(k, "cumulative", rate, r.enrichment_cumulative.at(k));
        }
    });
}

LexicalResult lexical_distinctiveness(const corpus::CorpusStore& store,
                                      const community::Partition& l1,
                                      const community::Partition& l2) {
    LexicalResult result;

    // Group labeled papers by L1 parent.
    struct Doc {
        const corpus::PaperRecord* rec;
        uint32_t l2;
    };
    std::unordered_map<uint32_t, std::vector<Doc>> parents;
    for (const auto& rec : store.records()) {
        int64_t c1 = l1.find_label(rec.paper_id);
        int64_t c2 = l2.find_label(rec.paper_id);
        if (c1 < 0 || c2 < 0) continue;  // unlabeled (e.g. orphans)
        parents[static_cast<uint32_t>(c1)].push_back(
            {&rec, static_cast<uint32_t>(c2)});
    }

    std::map<std::string, double> domain_sum;
    std::map<std::string, size_t> domain_count;

    std::vector<uint32_t> parent_ids;
    parent_ids.reserve(parents.size());
    for (const auto& [c, docs] : parents) parent_ids.push_back(c);
    std::sort(parent_ids.begin(), parent_ids.end());

    for (uint32_t parent : parent_ids) {
        const auto& docs = parents[parent];
        std::unordered_set<uint32_t> children;
        for (const auto& d : docs) children.insert(d.l2);
        if (children.size() < 2) {
            ++result.skipped_single_child;
            continue;
        }

        // Per-unigram: total tf across the parent, df, set of child L2s.
        struct TermStat {
            uint64_t tf = 0;
            uint32_t df = 0;
            uint32_t first_child = 0;
            bool single_child = true;
            uint32_t last_doc_seen = UINT32_MAX;
        };
        std::unordered_map<std::string, TermStat> stats;
        std::map<std::string, size_t> domain_votes;
        for (uint32_t d = 0; d < docs.size(); ++d) {
            const auto& doc = docs[d];
            ++domain_votes[doc.rec->domain];
            auto tokens = text::tokenize(doc.rec->title + " " + doc.rec->abstract);
            for (const auto& tok : tokens) {
                if (text::is_stopword(tok)) continue;
                TermStat& st = stats[tok];
                if (st.tf == 0) {
                    st.first_child = doc.l2;
                } else if (st.single_child && st.first_child != doc.l2) {
                    st.single_child = false;
                }
                ++st.tf;
                if (st.last_doc_seen != d) {
                    st.last_doc_seen = d;
                    ++st.df;
                }
            }
        }

        double total_mass = 0, unique_mass = 0;
        double n_docs = static_cast<double>(docs.size());
        for (const auto& [tok, st] : stats) {
            double idf = std::log(n_docs / static_cast<double>(st.df));
            double mass = static_cast<double>(st.tf) * idf;
            total_mass += mass;
            if (st.single_child) unique_mass += mass;
        }
        double fraction = total_mass > 0 ? unique_mass / total_mass : 0.0;

        // Majority domain, ties to the lexicographically smallest.
        std::string domain;
        size_t best = 0;
        for (const auto& [d, votes] : domain_votes) {
            if (votes > best) {
                best = votes;
                domain = d;
            }
        }
        domain_sum[domain] += fraction;
        domain_count[domain] += 1;
    }
    for (const auto& [domain, sum] : domain_sum) {
        result.by_domain[domain] = sum / static_cast<double>(domain_count[domain]);
        result.parents_by_domain[domain] = domain_count[domain];
    }
    return result;
}

}  // namespace citegraph::concordance
