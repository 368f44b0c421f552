#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "retsel/corpus.hpp"

namespace retsel {

// Which alternative the binary label refers to: the ALT class means "dense"
// under Scheme::Dense and "run dense as well" under Scheme::Hybrid. The
// decision rule itself is the same for both schemes.
enum class Scheme { Dense, Hybrid };

enum class Strategy { Sparse, Alt };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& s);

struct StrategyLabel {
    std::string query_id;
    Strategy label = Strategy::Sparse;
    Scheme scheme = Scheme::Dense;
    std::optional<std::size_t> first_relevant;  // 1-based rank, nullopt if absent
    std::size_t threshold = 0;                  // T used for the decision
};

using LabelMap = std::map<std::string, StrategyLabel>;

// 1-based rank of the first entry of `run` whose doc id is relevant;
// nullopt if the run contains no relevant document. The relevant set must
// be nonempty.
std::optional<std::size_t> first_relevant_rank(const RankedList& run,
                                               const std::set<std::string>& relevant);

// Sparse iff the first relevant document sits at rank <= t (inclusive).
Strategy decide_strategy(std::optional<std::size_t> rank, std::size_t t);

StrategyLabel label_query(const std::string& query_id, std::optional<std::size_t> rank,
                          std::size_t t, Scheme scheme);

struct LabelReport {
    LabelMap labels;
    std::vector<std::string> skipped;  // query ids with no judgments
};

// Labels every query in `runs` that has judgments; the rest are skipped and
// reported.
LabelReport label_all(const RunMap& runs, const JudgmentSet& judgments, std::size_t t, Scheme scheme);

// Union of the sparse and dense pools with per-document provenance. No score
// fusion: the pool feeds recall evaluation and downstream reranking.
struct HybridPool {
    struct Provenance {
        bool from_sparse = false;
        bool from_dense = false;
    };
    std::string query_id;
    std::map<std::string, Provenance> docs;

    std::set<std::string> doc_ids() const;
};

HybridPool merge_hybrid(const RankedList& sparse, const RankedList& dense);

// labels.tsv: `qid<TAB>label<TAB>rank_or_NONE<TAB>scheme<TAB>T`
void save_labels(const std::string& path, const LabelMap& labels,
                 const std::vector<std::string>& header = {});
LabelMap load_labels(const std::string& path);

}  // namespace retsel
