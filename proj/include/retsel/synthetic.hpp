#pragma once

#include <cstdint>
#include <vector>

#include "retsel/corpus.hpp"
#include "retsel/dense_index.hpp"

namespace retsel {

// Seeded desk-scale dataset with three planted query populations:
//   - exact:        query shares rare keywords with its relevant passage, so
//                   the sparse retriever finds it at the top;
//   - mismatch:     query uses alias tokens that never occur in the corpus;
//                   only the alias-table dense route can find the passage;
//   - unanswerable: query tokens are unindexed and unrelated to the judged
//                   passage, so both retrievers miss it.
// Query ids are prefixed qe/qm/qu by population.
struct SyntheticSpec {
    std::size_t n_docs = 12000;
    std::size_t n_exact = 70;
    std::size_t n_mismatch = 70;
    std::size_t n_unanswerable = 60;
    std::size_t vocab = 2000;
    std::size_t doc_len_min = 8;
    std::size_t doc_len_max = 12;
    std::uint64_t seed = 42;
};

struct SyntheticData {
    std::vector<TextRecord> collection;
    std::vector<TextRecord> queries;
    JudgmentSet qrels;
    AliasTable aliases;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace retsel
