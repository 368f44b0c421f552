#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "retsel/corpus.hpp"

namespace retsel {

// query-side token rewrites: token -> canonical token (TSV `token<TAB>canonical`)
using AliasTable = std::map<std::string, std::string>;

// Fixed-dimension document embeddings, exact inner-product search only.
// Immutable once filled; vectors stored row-major.
class EmbeddingStore {
  public:
    explicit EmbeddingStore(std::size_t dim);

    // throws on duplicate id, wrong dimension, or non-finite component
    void add(const std::string& id, std::span<const double> vec);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return ids_.size(); }
    const std::string& id(std::size_t i) const { return ids_[i]; }
    std::span<const double> vector_at(std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }
    const std::vector<std::string>& ids() const { return ids_; }
    bool contains(const std::string& id) const { return index_of_.count(id) > 0; }
    std::span<const double> vector_of(const std::string& id) const;

  private:
    std::size_t dim_;
    std::vector<std::string> ids_;
    std::vector<double> data_;
    std::map<std::string, std::size_t> index_of_;
};

// Deterministic pseudo-random unit vector for a token (stand-in embedding
// space; every call with the same (token, dim, seed) returns the same vector).
std::vector<double> token_vector(const std::string& token, std::size_t dim, std::uint64_t seed);

// Bag-of-hashed-token-vectors embedding: normalized sum of the token vectors
// of the tokenized text. Zero-token texts map to a fixed seeded unit vector.
// Aliases, when given, rewrite tokens before hashing, so an alias and its
// canonical token share a vector.
std::vector<double> embed_text(std::string_view text, std::size_t dim, std::uint64_t seed,
                               const AliasTable* aliases = nullptr);

EmbeddingStore embed_synthetic(const std::vector<TextRecord>& records, std::size_t dim,
                               std::uint64_t seed, const AliasTable* aliases = nullptr);

// embeddings.tsv: `id<TAB>v1,v2,...,vd`; dimension inferred from the first row.
EmbeddingStore load_embeddings(const std::string& path);
void save_embeddings(const std::string& path, const EmbeddingStore& store,
                     const std::vector<std::string>& header = {});

AliasTable load_alias_table(const std::string& path);

// Exact top-k by dot product descending, ties by ascending doc id. Every
// document is eligible, including non-positive scores.
RankedList search_dense(const EmbeddingStore& store, std::span<const double> query, std::size_t k);

}  // namespace retsel
