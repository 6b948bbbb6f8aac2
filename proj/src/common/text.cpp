#include "citegraph/common/text.hpp"

namespace citegraph::text {

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        bool token_char = false;
        char emit = static_cast<char>(c);
        if (c >= 'a' && c <= 'z') {
            token_char = true;
        } else if (c >= 'A' && c <= 'Z') {
            token_char = true;
            emit = static_cast<char>(c - 'A' + 'a');
        } else if (c >= '0' && c <= '9') {
            token_char = true;
        } else if (c >= 0x80) {
            token_char = true;  // keep UTF-8 continuation/lead bytes intact
        }
        if (token_char) {
            cur.push_back(emit);
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string normalize_for_key(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char c : s) {
        char emit;
        if (c >= 'A' && c <= 'Z') {
            emit = static_cast<char>(c - 'A' + 'a');
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
            emit = static_cast<char>(c);
        } else {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(emit);
    }
    return out;
}

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> kStopwords = {
        "a", "about", "above", "after", "again", "against", "all", "almost", "alone", "along",
        "already", "also", "although", "always", "am", "among", "an", "and", "another", "any",
        "anybody", "anyone", "anything", "anywhere", "are", "area", "areas", "around", "as", "ask",
        "asked", "asking", "asks", "at", "away", "b", "back", "backed", "backing", "backs",
        "be", "became", "because", "become", "becomes", "been", "before", "began", "behind", "being",
        "beings", "best", "better", "between", "big", "both", "but", "by", "c", "came",
        "can", "cannot", "case", "cases", "certain", "certainly", "clear", "clearly", "come", "could",
        "d", "did", "differ", "different", "differently", "do", "does", "done", "down", "downed",
        "downing", "downs", "during", "e", "each", "early", "either", "end", "ended", "ending",
        "ends", "enough", "even", "evenly", "ever", "every", "everybody", "everyone", "everything", "everywhere",
        "f", "face", "faces", "fact", "facts", "far", "felt", "few", "find", "finds",
        "first", "for", "four", "from", "full", "fully", "further", "furthered", "furthering", "furthers",
        "g", "gave", "general", "generally", "get", "gets", "give", "given", "gives", "go",
        "going", "good", "goods", "got", "great", "greater", "greatest", "group", "grouped", "grouping",
        "groups", "h", "had", "has", "have", "having", "he", "her", "here", "herself",
        "high", "higher", "highest", "him", "himself", "his", "how", "however", "i", "if",
        "important", "in", "interest", "interested", "interesting", "interests", "into", "is", "it", "its",
        "itself", "j", "just", "k", "keep", "keeps", "kind", "knew", "know", "known",
        "knows", "l", "large", "largely", "last", "later", "latest", "least", "less", "let",
        "lets", "like", "likely", "long", "longer", "longest", "m", "made", "make", "making",
        "man", "many", "may", "me", "member", "members", "men", "might", "more", "most",
        "mostly", "mr", "mrs", "much", "must", "my", "myself", "n", "necessary", "need",
        "needed", "needing", "needs", "never", "new", "newer", "newest", "next", "no", "nobody",
        "non", "noone", "not", "nothing", "now", "nowhere", "number", "numbers", "o", "of",
        "off", "often", "old", "older", "oldest", "on", "once", "one", "only", "open",
        "opened", "opening", "opens", "or", "order", "ordered", "ordering", "orders", "other", "others",
        "our", "out", "over", "p", "part", "parted", "parting", "parts", "per", "perhaps",
        "place", "places", "point", "pointed", "pointing", "points", "possible", "present", "presented", "presenting",
        "presents", "problem", "problems", "put", "puts", "q", "quite", "r", "rather", "really",
        "right", "room", "rooms", "s", "said", "same", "saw", "say", "says", "second",
    };
    return kStopwords;
}

bool is_stopword(const std::string& token) { return stopwords().count(token) != 0; }

}  // namespace citegraph::text
