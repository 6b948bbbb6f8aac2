#include "citegraph/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <regex>

#include <nlohmann/json.hpp>

#include "citegraph/common/error.hpp"
#include "citegraph/common/io.hpp"
#include "citegraph/common/rng.hpp"
#include "citegraph/common/text.hpp"

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace citegraph::corpus {

std::string canonical_doi(std::string_view raw) {
    std::string s;
    size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    s.reserve(e - b);
    for (size_t i = b; i < e; ++i) {
        char c = raw[i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        s.push_back(c);
    }
    constexpr std::string_view kPrefix = "https://doi.org/";
    if (s.rfind(kPrefix, 0) == 0) s.erase(0, kPrefix.size());
    return s;
}

std::string dedup_key(const PaperRecord& rec) {
    if (!rec.doi.empty()) return rec.doi;
    std::string norm_title = text::normalize_for_key(rec.title);
    std::string norm_author =
        rec.authors.empty() ? std::string() : text::normalize_for_key(rec.authors.front());
    std::string year = rec.year ? std::to_string(*rec.year) : std::string();
    uint64_t h = fnv1a64(norm_title);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(norm_author, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(year, h);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string("tay:") + buf;
}

bool CorpusStore::contains(const std::string& paper_id) const {
    return by_id_.count(paper_id) != 0;
}

const PaperRecord& CorpusStore::get(const std::string& paper_id) const {
    auto it = by_id_.find(paper_id);
    if (it == by_id_.end()) throw std::out_of_range("no such paper: " + paper_id);
    return records_[it->second];
}

const PaperRecord* CorpusStore::find(const std::string& paper_id) const {
    auto it = by_id_.find(paper_id);
    return it == by_id_.end() ? nullptr : &records_[it->second];
}

const std::vector<std::string>& CorpusStore::sources_of(const std::string& paper_id) const {
    static const std::vector<std::string> kEmpty;
    auto it = provenance_.find(paper_id);
    return it == provenance_.end() ? kEmpty : it->second;
}

std::vector<std::string> CorpusStore::domains() const {
    std::vector<std::string> out;
    for (const auto& r : records_) out.push_back(r.domain);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::string> CorpusStore::ids() const {
    std::vector<std::string> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.paper_id);
    return out;
}

CorpusStore CorpusStore::from_records(std::vector<PaperRecord> records,
                                      std::map<std::string, std::vector<std::string>> provenance) {
    CorpusStore store;
    std::sort(records.begin(), records.end(),
              [](const PaperRecord& a, const PaperRecord& b) { return a.paper_id < b.paper_id; });
    for (size_t i = 0; i + 1 < records.size(); ++i) {
        if (records[i].paper_id == records[i + 1].paper_id)
            throw std::logic_error("duplicate paper_id in store: " + records[i].paper_id);
    }
    store.records_ = std::move(records);
    store.by_id_.reserve(store.records_.size());
    for (size_t i = 0; i < store.records_.size(); ++i)
        store.by_id_.emplace(store.records_[i].paper_id, i);
    store.provenance_ = std::move(provenance);
    return store;
}

namespace {

// Disjoint-set over record indexes; grouping is by connected components of
// "same paper_id or same dedup key", which makes the result independent of
// the input order.
struct UnionFind {
    std::vector<size_t> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    size_t find(size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);  // keep smallest index as root
        parent[b] = a;
    }
};

std::string record_sort_blob(const PaperRecord& r) { return record_to_json_line(r); }

// Total order for picking a merge winner: longest abstract, then smallest
// source tag, then smallest id, then smallest serialized form.
bool merge_wins(const PaperRecord& a, const PaperRecord& b) {
    if (a.abstract.size() != b.abstract.size()) return a.abstract.size() > b.abstract.size();
    if (a.source != b.source) return a.source < b.source;
    if (a.paper_id != b.paper_id) return a.paper_id < b.paper_id;
    return record_sort_blob(a) < record_sort_blob(b);
}

}  // namespace

IngestResult ingest(std::vector<PaperRecord> records, ConflictPolicy on_conflict) {
    IngestResult result;
    result.n_input = records.size();

    // Normalize per record before grouping.
    for (auto& r : records) {
        r.doi = canonical_doi(r.doi);
        std::sort(r.references.begin(), r.references.end());
        r.references.erase(std::unique(r.references.begin(), r.references.end()),
                           r.references.end());
        auto self = std::lower_bound(r.references.begin(), r.references.end(), r.paper_id);
        if (self != r.references.end() && *self == r.paper_id) {
            r.references.erase(self);
            ++result.n_self_references_dropped;
        }
    }

    UnionFind uf(records.size());
    std::unordered_map<std::string, size_t> by_id, by_key;
    std::vector<std::string> keys(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        keys[i] = dedup_key(records[i]);
        auto [it_id, new_id] = by_id.emplace(records[i].paper_id, i);
        if (!new_id) uf.unite(it_id->second, i);
        auto [it_key, new_key] = by_key.emplace(keys[i], i);
        if (!new_key) uf.unite(it_key->second, i);
    }

    std::map<size_t, std::vector<size_t>> groups;  // root -> member indexes
    for (size_t i = 0; i < records.size(); ++i) groups[uf.find(i)].push_back(i);

    std::vector<PaperRecord> kept;
    std::map<std::string, std::vector<std::string>> provenance;
    for (auto& [root, members] : groups) {
        if (members.size() > 1 && on_conflict == ConflictPolicy::reject_conflicts) {
            for (size_t i : members)
                result.rejections.push_back(
                    {0, records[i].paper_id, "conflict group rejected by policy"});
            continue;
        }
        size_t winner = members.front();
        for (size_t i : members)
            if (merge_wins(records[i], records[winner])) winner = i;

        PaperRecord rec = std::move(records[winner]);
        std::vector<std::string> sources;
        for (size_t i : members) {
            const std::string& src = (i == winner) ? rec.source : records[i].source;
            if (!src.empty()) sources.push_back(src);
            if (i != winner) {
                for (const auto& ref : records[i].references) rec.references.push_back(ref);
                if (records[i].paper_id != rec.paper_id)
                    result.dedup_of.emplace_back(records[i].paper_id, rec.paper_id);
            }
        }
        std::sort(rec.references.begin(), rec.references.end());
        rec.references.erase(std::unique(rec.references.begin(), rec.references.end()),
                             rec.references.end());
        auto self = std::lower_bound(rec.references.begin(), rec.references.end(), rec.paper_id);
        if (self != rec.references.end() && *self == rec.paper_id) rec.references.erase(self);
        std::sort(sources.begin(), sources.end());
        sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
        provenance[rec.paper_id] = std::move(sources);
        kept.push_back(std::move(rec));
    }

    std::sort(result.dedup_of.begin(), result.dedup_of.end());
    result.dedup_of.erase(std::unique(result.dedup_of.begin(), result.dedup_of.end()),
                          result.dedup_of.end());
    result.store = CorpusStore::from_records(std::move(kept), std::move(provenance));
    return result;
}

PaperRecord record_from_json_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw InputError(std::string("bad json: ") + e.what());
    }
    if (!j.is_object()) throw InputError("record is not an object");
    PaperRecord rec;
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
        throw InputError("missing or empty 'id'");
    rec.paper_id = j["id"].get<std::string>();
    auto opt_str = [&](const char* key) -> std::string {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return {};
        if (!it->is_string()) throw InputError(std::string("field '") + key + "' not a string");
        return it->get<std::string>();
    };
    rec.doi = opt_str("doi");
    rec.title = opt_str("title");
    if (rec.title.empty()) throw InputError("missing or empty 'title'");
    rec.abstract = opt_str("abstract");
    rec.venue = opt_str("venue");
    rec.domain = opt_str("domain");
    rec.type = opt_str("type");
    rec.source = opt_str("source");
    if (auto it = j.find("year"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw InputError("'year' not an integer");
        int y = it->get<int>();
        if (y < 1000 || y > 9999) throw InputError("'year' not a 4-digit year");
        rec.year = y;
    }
    auto opt_list = [&](const char* key, std::vector<std::string>& out) {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return;
        if (!it->is_array()) throw InputError(std::string("field '") + key + "' not an array");
        for (const auto& v : *it) {
            if (!v.is_string()) throw InputError(std::string("field '") + key + "' has non-string");
            out.push_back(v.get<std::string>());
        }
    };
    opt_list("authors", rec.authors);
    opt_list("references", rec.references);
    return rec;
}

ParsedStream read_corpus_jsonl(const std::string& path) {
    ParsedStream out;
    io::for_each_line(path, [&](size_t n, std::string_view line) {
        try {
            out.records.push_back(record_from_json_line(line));
        } catch (const InputError& e) {
            out.rejections.push_back({n, "", e.what()});
        }
    });
    return out;
}

std::string record_to_json_line(const PaperRecord& rec) {
    ordered_json j;
    j["id"] = rec.paper_id;
    j["doi"] = rec.doi;
    j["title"] = rec.title;
    j["abstract"] = rec.abstract;
    if (rec.year)
        j["year"] = *rec.year;
    else
        j["year"] = nullptr;
    j["venue"] = rec.venue;
    j["domain"] = rec.domain;
    j["authors"] = rec.authors;
    j["references"] = rec.references;
    j["type"] = rec.type;
    j["source"] = rec.source;
    return j.dump();
}

void write_corpus_jsonl(const std::string& path, const CorpusStore& store) {
    io::atomic_write(path, [&](std::ostream& out) {
        for (const auto& rec : store.records()) out << record_to_json_line(rec) << '\n';
    });
}

void write_dedup_sidecar(const std::string& path, const IngestResult& result) {
    io::atomic_write(path, [&](std::ostream& out) {
        for (const auto& [merged, into] : result.dedup_of) {
            ordered_json j;
            j["id"] = merged;
            j["dedup_of"] = into;
            out << j.dump() << '\n';
        }
        for (const auto& rej : result.rejections) {
            ordered_json j;
            if (!rej.id.empty()) j["id"] = rej.id;
            if (rej.line) j["line"] = rej.line;
            j["rejected"] = rej.reason;
            out << j.dump() << '\n';
        }
    });
}

namespace {

size_t utf8_length(const std::string& s) {
    size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

}  // namespace

FilterResult filter_eligibility(const CorpusStore& store, const FilterParams& params) {
    if (params.min_abstract_chars < 0 || params.min_year < 0)
        throw std::invalid_argument("filter thresholds must be >= 0");
    std::vector<std::regex> patterns;
    for (const auto& p : params.boilerplate_patterns) {
        try {
            patterns.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            throw InputError("bad boilerplate pattern '" + p + "': " + e.what());
        }
    }
    std::vector<std::string> allowed(params.allowed_types);
    std::sort(allowed.begin(), allowed.end());

    FilterResult result;
    std::vector<PaperRecord> kept;
    std::map<std::string, std::vector<std::string>> provenance;
    for (const auto& rec : store.records()) {
        bool ok = true;
        if (utf8_length(rec.abstract) < static_cast<size_t>(params.min_abstract_chars)) {
            ++result.report.failed_abstract;
            ok = false;
        }
        if (params.min_year > 0 && (!rec.year || *rec.year < params.min_year)) {
            ++result.report.failed_year;
            ok = false;
        }
        if (!allowed.empty() && !rec.type.empty() &&
            !std::binary_search(allowed.begin(), allowed.end(), rec.type)) {
            ++result.report.failed_type;
            ok = false;
        }
        for (const auto& re : patterns) {
            if (std::regex_search(rec.abstract, re)) {
                ++result.report.failed_boilerplate;
                ok = false;
                break;
            }
        }
        if (ok) {
            provenance[rec.paper_id] = store.sources_of(rec.paper_id);
            kept.push_back(rec);
            ++result.report.kept;
        } else {
            ++result.report.removed;
        }
    }
    result.store = CorpusStore::from_records(std::move(kept), std::move(provenance));
    return result;
}

std::vector<std::string> stratified_sample(const CorpusStore& store, size_t per_domain_n,
                                           uint64_t seed) {
    // domain -> year stratum -> ids (ids arrive sorted from the store)
    std::map<std::string, std::map<int64_t, std::vector<std::string>>> strata;
    for (const auto& rec : store.records())
        strata[rec.domain][rec.year ? *rec.year : -1].push_back(rec.paper_id);

    std::vector<std::string> sample;
    for (auto& [domain, years] : strata) {
        size_t total = 0;
        for (auto& [y, ids] : years) total += ids.size();
        if (total < per_domain_n) {
            throw InputError("domain '" + domain + "' has " + std::to_string(total) +
                             " records, need " + std::to_string(per_domain_n) + " (shortfall " +
                             std::to_string(per_domain_n - total) + ")");
        }
        // Largest-remainder quotas over the year distribution, exact integer
        // arithmetic: quota_y = floor(n*c_y/total), leftovers go to the
        // largest n*c_y mod total, ties to the earliest year.
        std::vector<std::pair<int64_t, size_t>> quota;  // (year, count)
        std::vector<std::pair<uint64_t, int64_t>> rema;  // (remainder, year)
        size_t assigned = 0;
        for (auto& [y, ids] : years) {
            uint64_t num = static_cast<uint64_t>(per_domain_n) * ids.size();
            size_t q = static_cast<size_t>(num / total);
            quota.emplace_back(y, q);
            rema.emplace_back(num % total, y);
            assigned += q;
        }
        std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        // Leftover count is < number of strata, so rema never wraps.
        for (size_t i = 0; assigned < per_domain_n; ++i, ++assigned) {
            int64_t y = rema[i].second;
            for (auto& q : quota)
                if (q.first == y) {
                    ++q.second;
                    break;
                }
        }
        for (auto& [y, q] : quota) {
            auto ids = years[y];
            Rng rng(derive_seed(derive_seed(seed, domain), static_cast<uint64_t>(y + 1)));
            rng.shuffle(ids);
            for (size_t i = 0; i < q; ++i) sample.push_back(ids[i]);
        }
    }
    std::sort(sample.begin(), sample.end());
    return sample;
}

}  // namespace citegraph::corpus
