#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace retsel {

// One passage or query: a whitespace-free id plus raw UTF-8 text.
struct TextRecord {
    std::string id;
    std::string text;
};

// Lowercases and splits on every non-alphanumeric byte. Only ASCII characters
// count as alphanumeric; anything else (punctuation, whitespace, non-ASCII
// code points) separates tokens. No stemming, no stopword removal.
std::vector<std::string> tokenize(std::string_view text);

// Query-side term semantics everywhere: duplicates dropped, first-appearance
// order kept.
std::vector<std::string> unique_terms(const std::vector<std::string>& tokens);

struct ScoredDoc {
    std::string doc_id;
    double score;

    bool operator==(const ScoredDoc&) const = default;
};

// Ordered result list for one query. Entries sorted by score descending,
// ties by ascending doc id; no duplicate doc ids; length <= cutoff.
struct RankedList {
    std::string query_id;
    std::vector<ScoredDoc> entries;
    std::size_t cutoff = 0;

    // Restores the ordering invariant and truncates to cutoff (cutoff 0 is
    // treated as "no limit" and replaced by the entry count). Throws on
    // duplicate doc ids.
    void normalize();
};

using JudgmentSet = std::map<std::string, std::set<std::string>>;
using ProbabilityMap = std::map<std::string, double>;
using RunMap = std::map<std::string, RankedList>;

// collection.tsv / queries.tsv: one record per line, `id<TAB>text`.
std::vector<TextRecord> load_collection(const std::string& path);
void save_collection(const std::string& path, const std::vector<TextRecord>& records,
                     const std::vector<std::string>& header = {});

// TREC qrels: `qid 0 docid grade`, whitespace separated. Keeps (qid, docid)
// pairs with grade >= min_grade; queries with no qualifying judgment are
// absent from the result.
JudgmentSet load_qrels(const std::string& path, int min_grade = 1);
void save_qrels(const std::string& path, const JudgmentSet& qrels,
                const std::vector<std::string>& header = {});

// TREC run files: `qid Q0 docid rank score tag`. Loading re-establishes the
// RankedList invariant; saving writes ranks from 1 and scores with six
// decimal digits.
RunMap load_run(const std::string& path);
void save_run(const std::string& path, const RunMap& runs, const std::string& tag,
              const std::vector<std::string>& header = {});

// probability file: `qid<TAB>p_alt`, every value in [0,1].
ProbabilityMap load_probabilities(const std::string& path);
void save_probabilities(const std::string& path, const ProbabilityMap& probs,
                        const std::vector<std::string>& header = {});

}  // namespace retsel
