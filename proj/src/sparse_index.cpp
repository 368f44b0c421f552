#include "retsel/sparse_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "retsel/common.hpp"

namespace retsel {

namespace {

// Per-term upper bounds are padded by a hair above the exact maximum so that
// summation-order rounding can never push a bound sum below the true score
// of a document that ties the heap threshold; WAND must keep exact ties.
constexpr double kBoundPad = 1e-10;

constexpr char kMagic[8] = {'R', 'S', 'E', 'L', 'I', 'D', 'X', '1'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_str(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) fail("truncated index file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) fail("truncated index file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

std::string get_str(std::istream& in) {
    std::uint32_t n = get_u32(in);
    std::string s(n, '\0');
    if (n && !in.read(s.data(), n)) fail("truncated index file");
    return s;
}

struct Hit {
    double score;
    std::uint32_t ordinal;
};

}  // namespace

InvertedIndex InvertedIndex::build(const std::vector<TextRecord>& collection, Bm25Params params) {
    if (collection.empty()) fail("empty collection");
    if (!(params.k1 > 0.0)) fail("k1 must be > 0");
    if (!(params.b >= 0.0 && params.b <= 1.0)) fail("b must be in [0,1]");
    if (collection.size() > std::numeric_limits<std::uint32_t>::max()) fail("collection too large");

    InvertedIndex index;
    index.params_ = params;
    index.doc_ids_.reserve(collection.size());
    index.doc_lengths_.reserve(collection.size());

    std::unordered_set<std::string> seen_ids;
    std::uint64_t total_tokens = 0;
    for (std::uint32_t ord = 0; ord < collection.size(); ++ord) {
        const auto& rec = collection[ord];
        if (rec.id.empty()) fail("empty doc id at position " + std::to_string(ord));
        if (rec.id.find_first_of(" \t\r\n") != std::string::npos)
            fail("doc id '" + rec.id + "' contains whitespace");
        if (!seen_ids.insert(rec.id).second) fail("duplicate doc id '" + rec.id + "'");

        auto tokens = tokenize(rec.text);
        index.doc_ids_.push_back(rec.id);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_tokens += tokens.size();

        std::unordered_map<std::string, std::uint32_t> tf;
        for (auto& t : tokens) ++tf[t];
        for (auto& [term, count] : tf) index.postings_[term].docs.push_back(Posting{ord, count});
    }
    index.avgdl_ = static_cast<double>(total_tokens) / static_cast<double>(collection.size());

    for (auto& [term, tp] : index.postings_) {
        // postings were appended in ordinal order; keep the invariant explicit
        std::sort(tp.docs.begin(), tp.docs.end(),
                  [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
        double idf = index.idf_for_df(tp.docs.size());
        double best = 0.0;
        for (const auto& p : tp.docs)
            best = std::max(best, idf * index.tf_part(p.tf, index.doc_lengths_[p.doc]));
        tp.max_score = best * (1.0 + kBoundPad);
    }
    return index;
}

std::size_t InvertedIndex::df(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.docs.size();
}

double InvertedIndex::idf_for_df(std::size_t df) const {
    double n = static_cast<double>(doc_count());
    double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double InvertedIndex::idf(const std::string& term) const { return idf_for_df(df(term)); }

const TermPostings* InvertedIndex::postings(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

double InvertedIndex::tf_part(std::uint32_t tf, std::uint32_t doc_len) const {
    double t = static_cast<double>(tf);
    double norm = params_.k1 * (1.0 - params_.b + params_.b * (static_cast<double>(doc_len) / avgdl_));
    return t * (params_.k1 + 1.0) / (t + norm);
}

double InvertedIndex::score(std::span<const std::string> query_tokens, std::uint32_t ordinal) const {
    if (ordinal >= doc_count()) fail("doc ordinal out of range");
    std::vector<std::string> terms = unique_terms({query_tokens.begin(), query_tokens.end()});
    double total = 0.0;
    for (const auto& term : terms) {
        const TermPostings* tp = postings(term);
        if (!tp) continue;
        auto it = std::lower_bound(tp->docs.begin(), tp->docs.end(), ordinal,
                                   [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (it == tp->docs.end() || it->doc != ordinal) continue;
        total += idf_for_df(tp->docs.size()) * tf_part(it->tf, doc_lengths_[ordinal]);
    }
    return total;
}

namespace {

struct Cursor {
    const std::vector<Posting>* docs;
    std::size_t pos;
    std::size_t term_index;  // position in the deduplicated query
    double idf;
    double bound;

    bool exhausted() const { return pos >= docs->size(); }
    std::uint32_t doc() const { return (*docs)[pos].doc; }
    std::uint32_t tf() const { return (*docs)[pos].tf; }
    void next() { ++pos; }
    void next_geq(std::uint32_t target) {
        auto it = std::lower_bound(docs->begin() + static_cast<std::ptrdiff_t>(pos), docs->end(), target,
                                   [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        pos = static_cast<std::size_t>(it - docs->begin());
    }
};

std::vector<Cursor> open_cursors(const InvertedIndex& index, const std::vector<std::string>& terms) {
    std::vector<Cursor> cursors;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const TermPostings* tp = index.postings(terms[i]);
        if (!tp || tp->docs.empty()) continue;
        cursors.push_back(Cursor{&tp->docs, 0, i, index.idf_for_df(tp->docs.size()), tp->max_score});
    }
    return cursors;
}

std::size_t count_matching_docs(const std::vector<Cursor>& cursors) {
    std::vector<std::uint32_t> all;
    for (const auto& c : cursors) {
        for (const auto& p : *c.docs) all.push_back(p.doc);
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all.size();
}

RankedList finish(const InvertedIndex& index, std::vector<Hit> hits, std::size_t k) {
    std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return index.doc_id(a.ordinal) < index.doc_id(b.ordinal);
    });
    if (hits.size() > k) hits.resize(k);
    RankedList out;
    out.cutoff = k;
    out.entries.reserve(hits.size());
    for (const auto& h : hits) out.entries.push_back(ScoredDoc{index.doc_id(h.ordinal), h.score});
    return out;
}

}  // namespace

RankedList search_exhaustive(const InvertedIndex& index, std::span<const std::string> query_tokens,
                             std::size_t k, SearchStats* stats) {
    if (k == 0) fail("k must be >= 1");
    std::vector<std::string> terms = unique_terms({query_tokens.begin(), query_tokens.end()});

    std::unordered_map<std::uint32_t, double> acc;
    for (const auto& term : terms) {
        const TermPostings* tp = index.postings(term);
        if (!tp) continue;
        double idf = index.idf_for_df(tp->docs.size());
        for (const auto& p : tp->docs) acc[p.doc] += idf * index.tf_part(p.tf, index.doc_length(p.doc));
    }

    if (stats) {
        stats->candidates = acc.size();
        stats->fully_scored = acc.size();
    }

    std::vector<Hit> hits;
    hits.reserve(acc.size());
    for (const auto& [ord, score] : acc)
        if (score > 0.0) hits.push_back(Hit{score, ord});
    return finish(index, std::move(hits), k);
}

RankedList search_wand(const InvertedIndex& index, std::span<const std::string> query_tokens,
                       std::size_t k, SearchStats* stats) {
    if (k == 0) fail("k must be >= 1");
    std::vector<std::string> terms = unique_terms({query_tokens.begin(), query_tokens.end()});
    std::vector<Cursor> storage = open_cursors(index, terms);
    if (stats) {
        stats->candidates = count_matching_docs(storage);
        stats->fully_scored = 0;
    }

    std::vector<Cursor*> cursors;
    cursors.reserve(storage.size());
    std::vector<double> idf_by_term(terms.size(), 0.0);
    for (auto& c : storage) {
        cursors.push_back(&c);
        idf_by_term[c.term_index] = c.idf;
    }

    auto worse = [&](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return index.doc_id(a.ordinal) < index.doc_id(b.ordinal);
    };
    // priority_queue with the "better" order on top()'s opposite end: top() is
    // the current k-th (worst retained) hit
    std::priority_queue<Hit, std::vector<Hit>, decltype(worse)> heap(worse);

    auto would_enter = [&](double score, std::uint32_t ordinal) {
        if (heap.size() < k) return true;
        const Hit& w = heap.top();
        if (score != w.score) return score > w.score;
        return index.doc_id(ordinal) < index.doc_id(w.ordinal);
    };

    std::vector<std::pair<std::size_t, std::uint32_t>> matched;  // (term_index, tf)
    while (!cursors.empty()) {
        std::sort(cursors.begin(), cursors.end(), [](const Cursor* a, const Cursor* b) {
            if (a->doc() != b->doc()) return a->doc() < b->doc();
            return a->term_index < b->term_index;
        });

        // Pivot: first prefix whose padded bound sum could still enter the
        // heap. Equality with the threshold is not skipped — a tying document
        // may still win on the doc-id tie-break.
        std::size_t pivot_idx = cursors.size();
        if (heap.size() < k) {
            pivot_idx = 0;
        } else {
            double theta = heap.top().score;
            double prefix = 0.0;
            for (std::size_t i = 0; i < cursors.size(); ++i) {
                prefix += cursors[i]->bound;
                if (prefix >= theta) {
                    pivot_idx = i;
                    break;
                }
            }
        }
        if (pivot_idx == cursors.size()) break;
        std::uint32_t pivot_doc = cursors[pivot_idx]->doc();

        if (cursors[0]->doc() == pivot_doc) {
            matched.clear();
            for (const Cursor* c : cursors) {
                if (c->doc() != pivot_doc) break;  // sorted by doc
                matched.emplace_back(c->term_index, c->tf());
            }
            // sum in query-term order so the result is bit-identical to the
            // exhaustive accumulator
            std::sort(matched.begin(), matched.end());
            double score = 0.0;
            std::uint32_t len = index.doc_length(pivot_doc);
            for (auto [ti, tf] : matched) score += idf_by_term[ti] * index.tf_part(tf, len);
            if (stats) ++stats->fully_scored;
            if (would_enter(score, pivot_doc)) {
                if (heap.size() == k) heap.pop();
                heap.push(Hit{score, pivot_doc});
            }
            for (Cursor* c : cursors) {
                if (c->doc() != pivot_doc) break;
                c->next();
            }
        } else {
            for (std::size_t i = 0; i < pivot_idx; ++i)
                if (cursors[i]->doc() < pivot_doc) cursors[i]->next_geq(pivot_doc);
        }

        cursors.erase(std::remove_if(cursors.begin(), cursors.end(),
                                     [](const Cursor* c) { return c->exhausted(); }),
                      cursors.end());
    }

    std::vector<Hit> hits;
    hits.reserve(heap.size());
    while (!heap.empty()) {
        hits.push_back(heap.top());
        heap.pop();
    }
    return finish(index, std::move(hits), k);
}

void InvertedIndex::save(const std::string& path) const {
    AtomicWriter w(path);
    auto& out = w.stream();
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, kFormatVersion);
    put_f64(out, params_.k1);
    put_f64(out, params_.b);
    put_f64(out, avgdl_);
    put_u64(out, doc_ids_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        put_str(out, doc_ids_[i]);
        put_u32(out, doc_lengths_[i]);
    }
    put_u64(out, postings_.size());
    for (const auto& [term, tp] : postings_) {
        put_str(out, term);
        put_f64(out, tp.max_score);
        put_u64(out, tp.docs.size());
        for (const auto& p : tp.docs) {
            put_u32(out, p.doc);
            put_u32(out, p.tf);
        }
    }
    w.commit();
}

InvertedIndex InvertedIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open " + path);
    char magic[8];
    if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kMagic)) fail(path + ": not an index file");
    std::uint32_t version = get_u32(in);
    if (version != kFormatVersion) fail(path + ": unsupported index version " + std::to_string(version));

    InvertedIndex index;
    index.params_.k1 = get_f64(in);
    index.params_.b = get_f64(in);
    index.avgdl_ = get_f64(in);
    std::uint64_t n_docs = get_u64(in);
    index.doc_ids_.reserve(n_docs);
    index.doc_lengths_.reserve(n_docs);
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        index.doc_ids_.push_back(get_str(in));
        index.doc_lengths_.push_back(get_u32(in));
    }
    std::uint64_t n_terms = get_u64(in);
    for (std::uint64_t i = 0; i < n_terms; ++i) {
        std::string term = get_str(in);
        TermPostings tp;
        tp.max_score = get_f64(in);
        std::uint64_t n = get_u64(in);
        tp.docs.reserve(n);
        std::uint32_t prev = 0;
        for (std::uint64_t j = 0; j < n; ++j) {
            Posting p{get_u32(in), get_u32(in)};
            if (p.doc >= n_docs || p.tf == 0 || (j > 0 && p.doc <= prev))
                fail(path + ": corrupt postings for term '" + term + "'");
            prev = p.doc;
            tp.docs.push_back(p);
        }
        index.postings_.emplace(std::move(term), std::move(tp));
    }
    return index;
}

}  // namespace retsel
