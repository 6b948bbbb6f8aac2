#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace citegraph::text {

// Lowercased unigrams. ASCII letters/digits are token characters (upper
// case folded); any non-ASCII UTF-8 byte is kept as a token character
// unchanged; everything else (punctuation, hyphen, whitespace) separates.
std::vector<std::string> tokenize(std::string_view s);

// Normalization used by dedup keys: lowercase, strip punctuation,
// collapse whitespace runs to a single space, trim.
std::string normalize_for_key(std::string_view s);

// 300 common English words; used by TF-IDF distinctiveness and the stub
// strategist's content-word extraction.
const std::unordered_set<std::string>& stopwords();

bool is_stopword(const std::string& token);

}  // namespace citegraph::text
