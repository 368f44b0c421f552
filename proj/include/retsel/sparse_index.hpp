#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "retsel/corpus.hpp"

namespace retsel {

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

struct Posting {
    std::uint32_t doc;  // ordinal into the doc table
    std::uint32_t tf;
};

struct TermPostings {
    std::vector<Posting> docs;  // doc ordinal ascending
    double max_score = 0.0;     // upper bound on the term's BM25 contribution
};

struct SearchStats {
    std::size_t candidates = 0;    // distinct docs containing at least one query term
    std::size_t fully_scored = 0;  // docs whose complete BM25 score was computed
};

// Inverted index with BM25 scoring (the nonnegative Lucene idf variant:
// idf = ln(1 + (N - df + 0.5)/(df + 0.5)), which stays positive for every
// df in [0, N] and so keeps WAND upper bounds valid). Immutable after build.
class InvertedIndex {
  public:
    static InvertedIndex build(const std::vector<TextRecord>& collection, Bm25Params params = {});

    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avgdl_; }
    const Bm25Params& params() const { return params_; }
    std::size_t vocab_size() const { return postings_.size(); }

    const std::string& doc_id(std::uint32_t ordinal) const { return doc_ids_[ordinal]; }
    std::uint32_t doc_length(std::uint32_t ordinal) const { return doc_lengths_[ordinal]; }

    std::size_t df(const std::string& term) const;
    double idf(const std::string& term) const;
    double idf_for_df(std::size_t df) const;

    const TermPostings* postings(const std::string& term) const;

    // BM25 contribution of one (tf, doc length) cell.
    double tf_part(std::uint32_t tf, std::uint32_t doc_len) const;

    // Full BM25 score of a document for a query. Duplicate query terms are
    // dropped; terms absent from the document contribute nothing. Terms are
    // summed in first-appearance order, which fixes the floating-point
    // result; every scoring path in this module uses the same order.
    double score(std::span<const std::string> query_tokens, std::uint32_t ordinal) const;

    // Versioned little-endian binary format, magic "RSELIDX1".
    void save(const std::string& path) const;
    static InvertedIndex load(const std::string& path);

  private:
    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    double avgdl_ = 0.0;
    std::map<std::string, TermPostings> postings_;
};

// Scores every document containing at least one query term; returns the
// top-k by (score desc, doc id asc). Zero-score documents are excluded.
RankedList search_exhaustive(const InvertedIndex& index, std::span<const std::string> query_tokens,
                             std::size_t k, SearchStats* stats = nullptr);

// Document-at-a-time WAND with per-term upper bounds and a heap threshold.
// Produces exactly the search_exhaustive output (same set, same order).
RankedList search_wand(const InvertedIndex& index, std::span<const std::string> query_tokens,
                       std::size_t k, SearchStats* stats = nullptr);

}  // namespace retsel
