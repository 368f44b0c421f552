#include "retsel/dense_index.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "retsel/common.hpp"

namespace retsel {

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
    if (dim < 2) fail("embedding dimension must be >= 2");
}

void EmbeddingStore::add(const std::string& id, std::span<const double> vec) {
    if (vec.size() != dim_)
        fail("vector for '" + id + "' has dimension " + std::to_string(vec.size()) + ", expected " +
             std::to_string(dim_));
    for (double v : vec)
        if (!std::isfinite(v)) fail("non-finite component in vector for '" + id + "'");
    if (!index_of_.emplace(id, ids_.size()).second) fail("duplicate doc id '" + id + "'");
    ids_.push_back(id);
    data_.insert(data_.end(), vec.begin(), vec.end());
}

std::span<const double> EmbeddingStore::vector_of(const std::string& id) const {
    auto it = index_of_.find(id);
    if (it == index_of_.end()) fail("unknown doc id '" + id + "'");
    return vector_at(it->second);
}

namespace {

void fill_unit_vector(std::uint64_t stream_seed, std::vector<double>& out) {
    SplitMix64 rng(stream_seed);
    double norm_sq = 0.0;
    for (auto& v : out) {
        v = 2.0 * rng.next_double() - 1.0;
        norm_sq += v * v;
    }
    double norm = std::sqrt(norm_sq);
    if (norm < 1e-12) {
        std::fill(out.begin(), out.end(), 0.0);
        out[0] = 1.0;
        return;
    }
    for (auto& v : out) v /= norm;
}

}  // namespace

std::vector<double> token_vector(const std::string& token, std::size_t dim, std::uint64_t seed) {
    if (dim < 2) fail("embedding dimension must be >= 2");
    std::vector<double> v(dim);
    fill_unit_vector(mix64(fnv1a64(token)) ^ mix64(seed), v);
    return v;
}

std::vector<double> embed_text(std::string_view text, std::size_t dim, std::uint64_t seed,
                               const AliasTable* aliases) {
    if (dim < 2) fail("embedding dimension must be >= 2");
    auto tokens = tokenize(text);
    std::vector<double> sum(dim, 0.0);
    std::vector<double> tv(dim);
    bool any = false;
    for (auto& tok : tokens) {
        const std::string* canonical = &tok;
        if (aliases) {
            auto it = aliases->find(tok);
            if (it != aliases->end()) canonical = &it->second;
        }
        fill_unit_vector(mix64(fnv1a64(*canonical)) ^ mix64(seed), tv);
        for (std::size_t i = 0; i < dim; ++i) sum[i] += tv[i];
        any = true;
    }
    if (!any) {
        // fixed vector for empty texts, distinct stream from any token
        fill_unit_vector(mix64(seed ^ 0x5eedfeedULL), sum);
        return sum;
    }
    double norm_sq = 0.0;
    for (double v : sum) norm_sq += v * v;
    double norm = std::sqrt(norm_sq);
    if (norm < 1e-12) {
        fill_unit_vector(mix64(seed ^ 0x5eedfeedULL), sum);
        return sum;
    }
    for (auto& v : sum) v /= norm;
    return sum;
}

EmbeddingStore embed_synthetic(const std::vector<TextRecord>& records, std::size_t dim,
                               std::uint64_t seed, const AliasTable* aliases) {
    EmbeddingStore store(dim);
    for (const auto& rec : records) store.add(rec.id, embed_text(rec.text, dim, seed, aliases));
    return store;
}

EmbeddingStore load_embeddings(const std::string& path) {
    std::size_t dim = 0;
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for_each_data_line(path, [&](std::size_t line_no, const std::string& line) {
        auto fields = split(line, '\t');
        if (fields.size() != 2) fail_at(path, line_no, "expected `id<TAB>v1,v2,...`");
        auto comps = split(fields[1], ',');
        std::vector<double> vec(comps.size());
        for (std::size_t i = 0; i < comps.size(); ++i) {
            if (!parse_double(comps[i], vec[i]))
                fail_at(path, line_no, "unparsable component '" + comps[i] + "'");
            if (!std::isfinite(vec[i])) fail_at(path, line_no, "non-finite component");
        }
        if (dim == 0) {
            dim = vec.size();
            if (dim < 2) fail_at(path, line_no, "dimension must be >= 2");
        } else if (vec.size() != dim) {
            fail_at(path, line_no, "dimension " + std::to_string(vec.size()) + " does not match first row (" +
                                       std::to_string(dim) + ")");
        }
        rows.emplace_back(fields[0], std::move(vec));
    });
    if (dim == 0) fail(path + ": no embeddings");
    EmbeddingStore store(dim);
    for (auto& [id, vec] : rows) store.add(id, vec);
    return store;
}

void save_embeddings(const std::string& path, const EmbeddingStore& store,
                     const std::vector<std::string>& header) {
    AtomicWriter w(path);
    w.write_header(header);
    for (std::size_t i = 0; i < store.size(); ++i) {
        w.stream() << store.id(i) << '\t';
        auto vec = store.vector_at(i);
        for (std::size_t j = 0; j < vec.size(); ++j) {
            if (j) w.stream() << ',';
            w.stream() << format_fixed(vec[j], 9);
        }
        w.stream() << '\n';
    }
    w.commit();
}

AliasTable load_alias_table(const std::string& path) {
    AliasTable table;
    for_each_data_line(path, [&](std::size_t line_no, const std::string& line) {
        auto fields = split(line, '\t');
        if (fields.size() != 2) fail_at(path, line_no, "expected `token<TAB>canonical`");
        if (fields[0].empty() || fields[1].empty()) fail_at(path, line_no, "empty token");
        table[fields[0]] = fields[1];
    });
    return table;
}

RankedList search_dense(const EmbeddingStore& store, std::span<const double> query, std::size_t k) {
    if (k == 0) fail("k must be >= 1");
    if (query.size() != store.dim())
        fail("query dimension " + std::to_string(query.size()) + " does not match store (" +
             std::to_string(store.dim()) + ")");

    struct Hit {
        double score;
        std::size_t idx;
    };
    auto worse = [&](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return store.id(a.idx) < store.id(b.idx);
    };
    std::priority_queue<Hit, std::vector<Hit>, decltype(worse)> heap(worse);

    for (std::size_t i = 0; i < store.size(); ++i) {
        auto vec = store.vector_at(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < vec.size(); ++j) dot += vec[j] * query[j];
        if (heap.size() < k) {
            heap.push(Hit{dot, i});
        } else {
            const Hit& w = heap.top();
            bool enters = dot != w.score ? dot > w.score : store.id(i) < store.id(w.idx);
            if (enters) {
                heap.pop();
                heap.push(Hit{dot, i});
            }
        }
    }

    std::vector<Hit> hits;
    hits.reserve(heap.size());
    while (!heap.empty()) {
        hits.push_back(heap.top());
        heap.pop();
    }
    std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return store.id(a.idx) < store.id(b.idx);
    });
    RankedList out;
    out.cutoff = k;
    out.entries.reserve(hits.size());
    for (const auto& h : hits) out.entries.push_back(ScoredDoc{store.id(h.idx), h.score});
    return out;
}

}  // namespace retsel
