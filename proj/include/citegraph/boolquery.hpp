#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "citegraph/corpus.hpp"

namespace citegraph::boolquery {

// One atom: a single token, or a phrase matched by token adjacency.
struct Atom {
    bool is_phrase = false;
    std::vector<std::string> tokens;  // lowercased; phrases have >= 1
};

// Atoms OR-ed together.
struct Group {
    std::vector<Atom> atoms;
};

// Groups AND-ed together; the whole grammar is flat (one paren level).
struct QueryAst {
    std::vector<Group> groups;
};

struct ParseError : std::runtime_error {
    size_t position;  // byte offset into the query string
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

// Grammar: space-separated terms are singleton AND groups; (a OR b) is one
// group; explicit AND separates groups; "..." is a phrase atom; keywords
// are case-insensitive. Nested parentheses, top-level OR, empty groups and
// unbalanced quotes/parens are parse errors carrying a byte position.
QueryAst parse_query(std::string_view text);

// Prints a canonical form; parse(print(parse(x))) == parse(x).
std::string print_query(const QueryAst& ast);

struct Posting {
    uint32_t doc;
    std::vector<uint32_t> positions;  // strictly increasing
};

// Positional index over title+abstract. Documents are numbered sorted by
// (domain, paper_id), so one domain is one contiguous doc range and
// postings stay sorted both globally and per domain.
class InvertedIndex {
  public:
    static InvertedIndex build(const corpus::CorpusStore& store);

    size_t n_docs() const { return doc_ids_.size(); }
    const std::string& doc_id(uint32_t doc) const { return doc_ids_[doc]; }
    const std::string& doc_domain(uint32_t doc) const;
    uint32_t doc_length(uint32_t doc) const { return doc_len_[doc]; }
    const std::vector<std::string>& domains() const { return domains_; }

    // [begin, end) doc range of a domain; empty string means all docs.
    // Throws InputError for an unknown domain.
    std::pair<uint32_t, uint32_t> domain_range(const std::string& domain) const;

    const std::vector<Posting>* postings(const std::string& token) const;

    // Document frequency of a token within a doc range.
    size_t df_in_range(const std::string& token, uint32_t begin, uint32_t end) const;

    uint64_t total_length_in_range(uint32_t begin, uint32_t end) const;

  private:
    std::vector<std::string> doc_ids_;
    std::vector<uint32_t> doc_len_;
    std::vector<std::string> domains_;                      // sorted, unique
    std::vector<uint32_t> domain_of_;                       // doc -> index into domains_
    std::vector<std::pair<uint32_t, uint32_t>> ranges_;     // parallel to domains_
    std::vector<uint64_t> len_prefix_;                      // doc length prefix sums
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

// Paper ids (sorted) whose title+abstract matches: every group has at
// least one matching atom; phrases need consecutive positions. Restricted
// to one domain when given.
std::vector<std::string> evaluate(const QueryAst& ast, const InvertedIndex& index,
                                  const std::string& domain = "");

// Matching doc numbers (sorted), the core evaluator.
std::vector<uint32_t> evaluate_docs(const QueryAst& ast, const InvertedIndex& index,
                                    uint32_t begin, uint32_t end);

}  // namespace citegraph::boolquery
