#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace citegraph::corpus {

struct PaperRecord {
    std::string paper_id;
    std::string doi;  // canonical form; empty = absent
    std::string title;
    std::string abstract;
    std::optional<int> year;
    std::string domain;
    std::string venue;
    std::string type;    // article type metadata; empty = unknown
    std::string source;  // provenance tag of the emitting source
    std::vector<std::string> authors;
    std::vector<std::string> references;  // sorted, unique, self excluded
};

// Lowercase and strip the resolver prefix. "canonical DOI" everywhere in
// this module means the output of this function.
std::string canonical_doi(std::string_view raw);

// Canonical DOI when present, else FNV-1a hash (hex) of the normalized
// (title, first author, year) triple.
std::string dedup_key(const PaperRecord& rec);

class CorpusStore {
  public:
    const std::vector<PaperRecord>& records() const { return records_; }

    bool contains(const std::string& paper_id) const;
    const PaperRecord& get(const std::string& paper_id) const;
    const PaperRecord* find(const std::string& paper_id) const;

    // Source tags per surviving record, sorted.
    const std::vector<std::string>& sources_of(const std::string& paper_id) const;

    size_t size() const { return records_.size(); }

    // Sorted list of distinct domains.
    std::vector<std::string> domains() const;

    std::vector<std::string> ids() const;

    // Internal: records must be sorted by paper_id and unique.
    static CorpusStore from_records(std::vector<PaperRecord> records,
                                    std::map<std::string, std::vector<std::string>> provenance);

  private:
    std::vector<PaperRecord> records_;  // sorted by paper_id
    std::unordered_map<std::string, size_t> by_id_;
    std::map<std::string, std::vector<std::string>> provenance_;
};

struct Rejection {
    size_t line = 0;     // 1-based input position when known
    std::string id;      // offending paper id when known
    std::string reason;
};

enum class ConflictPolicy {
    merge_longest_abstract,  // keep the record with the longest abstract,
                             // ties: smallest source tag, then smallest id
    reject_conflicts,        // drop every group with more than one record
};

struct IngestResult {
    CorpusStore store;
    std::vector<Rejection> rejections;
    // merged-away paper_id -> surviving paper_id, sorted by merged id
    std::vector<std::pair<std::string, std::string>> dedup_of;
    size_t n_input = 0;
    size_t n_self_references_dropped = 0;
};

// Order-independent: any permutation of `records` produces an identical
// store. Duplicate groups are connected components under "same paper_id or
// same dedup key"; references and provenance are unioned across a group.
IngestResult ingest(std::vector<PaperRecord> records,
                    ConflictPolicy on_conflict = ConflictPolicy::merge_longest_abstract);

// JSONL parsing. Malformed lines are reported, never fatal.
struct ParsedStream {
    std::vector<PaperRecord> records;
    std::vector<Rejection> rejections;
};
ParsedStream read_corpus_jsonl(const std::string& path);
PaperRecord record_from_json_line(std::string_view line);  // throws InputError

void write_corpus_jsonl(const std::string& path, const CorpusStore& store);
std::string record_to_json_line(const PaperRecord& rec);

// Sidecar report: one line per merged-away id ({"id","dedup_of"}) and one
// per rejection ({"id"?,"line"?,"rejected"}).
void write_dedup_sidecar(const std::string& path, const IngestResult& result);

struct FilterParams {
    int min_abstract_chars = 150;
    int min_year = 2010;
    std::vector<std::string> allowed_types;         // empty = no type filter
    std::vector<std::string> boilerplate_patterns;  // regexes on the abstract
};

struct FilterReport {
    size_t kept = 0;
    size_t removed = 0;
    size_t failed_abstract = 0;
    size_t failed_year = 0;
    size_t failed_type = 0;
    size_t failed_boilerplate = 0;
};

struct FilterResult {
    CorpusStore store;
    FilterReport report;
};

FilterResult filter_eligibility(const CorpusStore& store, const FilterParams& params);

// Per-domain stratified sample by year, largest-remainder rounding,
// reproducible bit-for-bit under a fixed seed. Returns sorted ids.
// Throws InputError naming the domain and shortfall when a domain has
// fewer than per_domain_n records.
std::vector<std::string> stratified_sample(const CorpusStore& store, size_t per_domain_n,
                                           uint64_t seed);

}  // namespace citegraph::corpus
