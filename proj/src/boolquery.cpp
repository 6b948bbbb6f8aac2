#include "citegraph/boolquery.hpp"

#include <algorithm>
#include <numeric>

#include "citegraph/common/error.hpp"
#include "citegraph/common/text.hpp"

namespace citegraph::boolquery {

namespace {

struct Lexeme {
    enum Kind { word, quoted, lparen, rparen } kind;
    std::string value;
    size_t pos;
};

std::vector<Lexeme> lex(std::string_view text) {
    std::vector<Lexeme> out;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '(') {
            out.push_back({Lexeme::lparen, "(", i++});
            continue;
        }
        if (c == ')') {
            out.push_back({Lexeme::rparen, ")", i++});
            continue;
        }
        if (c == '"') {
            size_t close = text.find('"', i + 1);
            if (close == std::string_view::npos)
                throw ParseError("unterminated quote", i);
            out.push_back({Lexeme::quoted, std::string(text.substr(i + 1, close - i - 1)), i});
            i = close + 1;
            continue;
        }
        size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\n' &&
               text[j] != '\r' && text[j] != '(' && text[j] != ')' && text[j] != '"')
            ++j;
        out.push_back({Lexeme::word, std::string(text.substr(i, j - i)), i});
        i = j;
    }
    return out;
}

bool keyword_is(const std::string& word, std::string_view upper) {
    if (word.size() != upper.size()) return false;
    for (size_t i = 0; i < word.size(); ++i) {
        char c = word[i];
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        if (c != upper[i]) return false;
    }
    return true;
}

// A single-token phrase is the same thing as a term; normalize so the
// printer round-trips.
Atom make_atom(const std::string& raw, bool quoted, size_t pos) {
    Atom atom;
    atom.tokens = text::tokenize(raw);
    if (atom.tokens.empty())
        throw ParseError(quoted ? "empty phrase" : "term has no indexable tokens", pos);
    atom.is_phrase = atom.tokens.size() > 1;
    return atom;
}

}  // namespace

QueryAst parse_query(std::string_view query_text) {
    std::vector<Lexeme> toks = lex(query_text);
    QueryAst ast;
    bool and_pending = false;
    size_t last_and_pos = 0;
    size_t i = 0;
    while (i < toks.size()) {
        const Lexeme& t = toks[i];
        if (t.kind == Lexeme::word && keyword_is(t.value, "AND")) {
            if (ast.groups.empty() || and_pending) throw ParseError("empty group before AND", t.pos);
            and_pending = true;
            last_and_pos = t.pos;
            ++i;
            continue;
        }
        if (t.kind == Lexeme::word && keyword_is(t.value, "OR"))
            throw ParseError("OR is only allowed inside parentheses", t.pos);
        if (t.kind == Lexeme::rparen) throw ParseError("unbalanced ')'", t.pos);

        Group group;
        if (t.kind == Lexeme::lparen) {
            size_t open_pos = t.pos;
            ++i;
            bool want_atom = true;
            for (;;) {
                if (i >= toks.size()) throw ParseError("unbalanced '('", open_pos);
                const Lexeme& u = toks[i];
                if (u.kind == Lexeme::rparen) {
                    if (group.atoms.empty()) throw ParseError("empty group", u.pos);
                    if (want_atom) throw ParseError("dangling OR", u.pos);
                    ++i;
                    break;
                }
                if (u.kind == Lexeme::lparen)
                    throw ParseError("nested parentheses are not allowed", u.pos);
                if (u.kind == Lexeme::word && keyword_is(u.value, "AND"))
                    throw ParseError("AND is not allowed inside parentheses", u.pos);
                if (u.kind == Lexeme::word && keyword_is(u.value, "OR")) {
                    if (want_atom) throw ParseError("expected a term before OR", u.pos);
                    want_atom = true;
                    ++i;
                    continue;
                }
                if (!want_atom)
                    throw ParseError("expected OR between atoms in a group", u.pos);
                group.atoms.push_back(make_atom(u.value, u.kind == Lexeme::quoted, u.pos));
                want_atom = false;
                ++i;
            }
        } else {
            group.atoms.push_back(make_atom(t.value, t.kind == Lexeme::quoted, t.pos));
            ++i;
        }
        ast.groups.push_back(std::move(group));
        and_pending = false;
    }
    if (and_pending) throw ParseError("empty group after AND", last_and_pos);
    if (ast.groups.empty()) throw ParseError("empty query", 0);
    return ast;
}

namespace {

std::string print_atom(const Atom& atom) {
    if (atom.is_phrase || atom.tokens.size() > 1 ||
        keyword_is(atom.tokens.front(), "AND") || keyword_is(atom.tokens.front(), "OR")) {
        std::string out = "\"";
        for (size_t i = 0; i < atom.tokens.size(); ++i) {
            if (i) out += ' ';
            out += atom.tokens[i];
        }
        out += '"';
        return out;
    }
    return atom.tokens.front();
}

}  // namespace

std::string print_query(const QueryAst& ast) {
    std::string out;
    for (size_t g = 0; g < ast.groups.size(); ++g) {
        if (g) out += " AND ";
        const Group& group = ast.groups[g];
        if (group.atoms.size() == 1) {
            out += print_atom(group.atoms.front());
        } else {
            out += '(';
            for (size_t a = 0; a < group.atoms.size(); ++a) {
                if (a) out += " OR ";
                out += print_atom(group.atoms[a]);
            }
            out += ')';
        }
    }
    return out;
}

InvertedIndex InvertedIndex::build(const corpus::CorpusStore& store) {
    InvertedIndex idx;
    const auto& records = store.records();
    std::vector<uint32_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        if (records[a].domain != records[b].domain) return records[a].domain < records[b].domain;
        return records[a].paper_id < records[b].paper_id;
    });

    idx.doc_ids_.reserve(records.size());
    idx.doc_len_.reserve(records.size());
    idx.domain_of_.reserve(records.size());
    for (uint32_t doc = 0; doc < order.size(); ++doc) {
        const auto& rec = records[order[doc]];
        if (idx.domains_.empty() || idx.domains_.back() != rec.domain) {
            if (!idx.ranges_.empty()) idx.ranges_.back().second = doc;
            idx.domains_.push_back(rec.domain);
            idx.ranges_.emplace_back(doc, doc);
        }
        idx.doc_ids_.push_back(rec.paper_id);
        idx.domain_of_.push_back(static_cast<uint32_t>(idx.domains_.size() - 1));

        std::vector<std::string> title_toks = text::tokenize(rec.title);
        std::vector<std::string> abstract_toks = text::tokenize(rec.abstract);
        uint32_t pos = 0;
        auto add = [&](const std::string& tok, uint32_t p) {
            auto& plist = idx.postings_[tok];
            if (plist.empty() || plist.back().doc != doc) plist.push_back({doc, {}});
            plist.back().positions.push_back(p);
        };
        for (const auto& tok : title_toks) add(tok, pos++);
        ++pos;  // gap: no phrase spans the title/abstract boundary
        for (const auto& tok : abstract_toks) add(tok, pos++);
        idx.doc_len_.push_back(
            static_cast<uint32_t>(title_toks.size() + abstract_toks.size()));
    }
    if (!idx.ranges_.empty()) idx.ranges_.back().second = static_cast<uint32_t>(records.size());

    idx.len_prefix_.assign(idx.doc_len_.size() + 1, 0);
    for (size_t i = 0; i < idx.doc_len_.size(); ++i)
        idx.len_prefix_[i + 1] = idx.len_prefix_[i] + idx.doc_len_[i];
    return idx;
}

const std::string& InvertedIndex::doc_domain(uint32_t doc) const {
    return domains_[domain_of_[doc]];
}

std::pair<uint32_t, uint32_t> InvertedIndex::domain_range(const std::string& domain) const {
    if (domain.empty()) return {0, static_cast<uint32_t>(doc_ids_.size())};
    auto it = std::lower_bound(domains_.begin(), domains_.end(), domain);
    if (it == domains_.end() || *it != domain)
        throw InputError("unknown domain: " + domain);
    return ranges_[static_cast<size_t>(it - domains_.begin())];
}

const std::vector<Posting>* InvertedIndex::postings(const std::string& token) const {
    auto it = postings_.find(token);
    return it == postings_.end() ? nullptr : &it->second;
}

size_t InvertedIndex::df_in_range(const std::string& token, uint32_t begin, uint32_t end) const {
    const auto* plist = postings(token);
    if (!plist) return 0;
    auto lo = std::lower_bound(plist->begin(), plist->end(), begin,
                               [](const Posting& p, uint32_t d) { return p.doc < d; });
    auto hi = std::lower_bound(plist->begin(), plist->end(), end,
                               [](const Posting& p, uint32_t d) { return p.doc < d; });
    return static_cast<size_t>(hi - lo);
}

uint64_t InvertedIndex::total_length_in_range(uint32_t begin, uint32_t end) const {
    return len_prefix_[end] - len_prefix_[begin];
}

namespace {

// Docs in [begin, end) where the phrase tokens appear at consecutive
// positions.
std::vector<uint32_t> phrase_docs(const Atom& atom, const InvertedIndex& index, uint32_t begin,
                                  uint32_t end) {
    std::vector<const std::vector<Posting>*> lists;
    for (const auto& tok : atom.tokens) {
        const auto* plist = index.postings(tok);
        if (!plist) return {};
        lists.push_back(plist);
    }
    std::vector<uint32_t> out;
    std::vector<size_t> cursor(lists.size(), 0);
    uint32_t target = begin;
    for (;;) {
        bool all_at_target = true;
        for (size_t i = 0; i < lists.size(); ++i) {
            const auto& plist = *lists[i];
            auto& c = cursor[i];
            while (c < plist.size() && plist[c].doc < target) ++c;
            if (c >= plist.size() || plist[c].doc >= end) return out;
            if (plist[c].doc != target) {
                target = plist[c].doc;
                all_at_target = false;
                break;
            }
        }
        if (!all_at_target) continue;
        // every list has `target`: look for consecutive positions
        const auto& first = lists[0]->at(cursor[0]).positions;
        for (uint32_t p : first) {
            bool ok = true;
            for (size_t i = 1; i < lists.size(); ++i) {
                const auto& positions = lists[i]->at(cursor[i]).positions;
                if (!std::binary_search(positions.begin(), positions.end(),
                                        p + static_cast<uint32_t>(i))) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                out.push_back(target);
                break;
            }
        }
        ++target;
    }
}

std::vector<uint32_t> term_docs(const Atom& atom, const InvertedIndex& index, uint32_t begin,
                                uint32_t end) {
    const auto* plist = index.postings(atom.tokens.front());
    if (!plist) return {};
    std::vector<uint32_t> out;
    auto lo = std::lower_bound(plist->begin(), plist->end(), begin,
                               [](const Posting& p, uint32_t d) { return p.doc < d; });
    for (auto it = lo; it != plist->end() && it->doc < end; ++it) out.push_back(it->doc);
    return out;
}

std::vector<uint32_t> union_sorted(std::vector<uint32_t> a, const std::vector<uint32_t>& b) {
    std::vector<uint32_t> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<uint32_t> intersect_sorted(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b) {
    std::vector<uint32_t> out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

std::vector<uint32_t> evaluate_docs(const QueryAst& ast, const InvertedIndex& index,
                                    uint32_t begin, uint32_t end) {
    if (ast.groups.empty()) throw std::invalid_argument("query has no groups");
    std::vector<uint32_t> result;
    bool first = true;
    for (const auto& group : ast.groups) {
        std::vector<uint32_t> matches;
        for (const auto& atom : group.atoms) {
            std::vector<uint32_t> docs = atom.is_phrase ? phrase_docs(atom, index, begin, end)
                                                        : term_docs(atom, index, begin, end);
            matches = union_sorted(std::move(matches), docs);
        }
        if (first) {
            result = std::move(matches);
            first = false;
        } else {
            result = intersect_sorted(result, matches);
        }
        if (result.empty()) break;
    }
    return result;
}

std::vector<std::string> evaluate(const QueryAst& ast, const InvertedIndex& index,
                                  const std::string& domain) {
    auto [begin, end] = index.domain_range(domain);
    std::vector<uint32_t> docs = evaluate_docs(ast, index, begin, end);
    std::vector<std::string> ids;
    ids.reserve(docs.size());
    for (uint32_t d : docs) ids.push_back(index.doc_id(d));
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace citegraph::boolquery
