#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <retsel/common.hpp>
#include <retsel/sparse_index.hpp>

#include "test_util.hpp"

using namespace retsel;
using retsel::testing::TempDir;

namespace {

// seeded corpus over a compact vocabulary; small vocab makes ties common
std::vector<TextRecord> random_corpus(SplitMix64& rng, std::size_t n_docs, std::size_t vocab,
                                      std::size_t max_len) {
    std::vector<TextRecord> docs;
    docs.reserve(n_docs);
    for (std::size_t i = 0; i < n_docs; ++i) {
        std::string text;
        std::size_t len = rng.next_below(max_len + 1);
        for (std::size_t t = 0; t < len; ++t) {
            if (t) text += ' ';
            text += "t" + std::to_string(rng.next_below(vocab));
        }
        // ids deliberately do not sort in ordinal order
        docs.push_back({"doc" + std::to_string((i * 7919) % (n_docs * 13)), text});
    }
    return docs;
}

std::vector<std::string> random_query(SplitMix64& rng, std::size_t vocab, std::size_t max_terms) {
    std::vector<std::string> q;
    std::size_t n = 1 + rng.next_below(max_terms);
    for (std::size_t i = 0; i < n; ++i) q.push_back("t" + std::to_string(rng.next_below(vocab)));
    return q;
}

bool same_ranking(const RankedList& a, const RankedList& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        if (a.entries[i].doc_id != b.entries[i].doc_id) return false;
        if (a.entries[i].score != b.entries[i].score) return false;  // bit-exact on purpose
    }
    return true;
}

}  // namespace

TEST_CASE("build_index hand counts") {
    auto index = InvertedIndex::build({{"d1", "cat"}, {"d2", "cat cat"}});
    CHECK(index.doc_count() == 2);
    CHECK(index.df("cat") == 2);
    CHECK(index.avg_doc_length() == doctest::Approx(1.5));
    const auto* tp = index.postings("cat");
    REQUIRE(tp != nullptr);
    REQUIRE(tp->docs.size() == 2);
    CHECK(tp->docs[0].tf == 1);
    CHECK(tp->docs[1].tf == 2);
}

TEST_CASE("document with no alphanumeric characters") {
    auto index = InvertedIndex::build({{"d1", "cat"}, {"d2", "!!! ???"}});
    CHECK(index.doc_length(1) == 0);
    CHECK(index.vocab_size() == 1);
}

TEST_CASE("build_index rejects bad input") {
    CHECK_THROWS_WITH_AS(InvertedIndex::build({}), doctest::Contains("empty collection"),
                         std::runtime_error);
    CHECK_THROWS_AS(InvertedIndex::build({{"d1", "x"}, {"d1", "y"}}), std::runtime_error);
    CHECK_THROWS_AS(InvertedIndex::build({{"", "x"}}), std::runtime_error);
    CHECK_THROWS_AS(InvertedIndex::build({{"a b", "x"}}), std::runtime_error);
    CHECK_THROWS_AS(InvertedIndex::build({{"d1", "x"}}, Bm25Params{0.0, 0.4}), std::runtime_error);
    CHECK_THROWS_AS(InvertedIndex::build({{"d1", "x"}}, Bm25Params{0.9, 1.5}), std::runtime_error);
}

TEST_CASE("df totals match a brute-force scan on a 1k corpus") {
    SplitMix64 rng(2024);
    auto docs = random_corpus(rng, 1000, 150, 30);
    auto index = InvertedIndex::build(docs);

    // oracle: count distinct (term, doc) pairs directly from the text
    std::size_t pairs = 0;
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
        auto terms = unique_terms(tokenize(d.text));
        pairs += terms.size();
        for (const auto& t : terms) ++df[t];
    }
    std::size_t posting_total = 0;
    for (const auto& [term, count] : df) {
        CHECK(index.df(term) == count);
        posting_total += index.df(term);
    }
    CHECK(index.vocab_size() == df.size());
    CHECK(posting_total == pairs);

    double mean = 0.0;
    for (const auto& d : docs) mean += static_cast<double>(tokenize(d.text).size());
    mean /= static_cast<double>(docs.size());
    CHECK(index.avg_doc_length() == doctest::Approx(mean));
}

TEST_CASE("bm25 single-doc hand evaluation") {
    auto index = InvertedIndex::build({{"d1", "cat"}}, Bm25Params{0.9, 0.4});
    std::vector<std::string> q = {"cat"};
    // idf = ln(1 + (1 - 1 + 0.5)/(1 + 0.5)) = ln(4/3); tf part = 1.9/1.9 = 1
    CHECK(index.score(q, 0) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-9));
    CHECK(index.score(q, 0) == doctest::Approx(0.287682).epsilon(1e-5));
}

TEST_CASE("bm25 semantics") {
    auto index = InvertedIndex::build({{"d1", "cat dog"}, {"d2", "dog"}});

    SUBCASE("unmatched query term contributes zero") {
        std::vector<std::string> q = {"zebra"};
        CHECK(index.score(q, 0) == 0.0);
    }
    SUBCASE("duplicate query terms count once") {
        std::vector<std::string> once = {"cat"};
        std::vector<std::string> twice = {"cat", "cat"};
        CHECK(index.score(once, 0) == index.score(twice, 0));
    }
    SUBCASE("score is monotone in tf") {
        auto idx = InvertedIndex::build(
            {{"d1", "cat x"}, {"d2", "cat cat"}, {"d3", "cat cat cat cat"}, {"d4", "y z"}});
        std::vector<std::string> q = {"cat"};
        // d1 and d2 share df and doc length; d2 has higher tf
        double s1 = idx.score(q, 0);
        double s2 = idx.score(q, 1);
        CHECK(s2 > s1);
    }
    SUBCASE("ordinal out of range") {
        std::vector<std::string> q = {"cat"};
        CHECK_THROWS_AS(index.score(q, 9), std::runtime_error);
    }
}

TEST_CASE("idf stays positive for every df") {
    auto index = InvertedIndex::build({{"d1", "a"}, {"d2", "a"}, {"d3", "a"}});
    for (std::size_t df = 0; df <= 3; ++df) CHECK(index.idf_for_df(df) > 0.0);
    CHECK(index.idf("a") > 0.0);       // df == N
    CHECK(index.idf("zzz") > 0.0);     // df == 0
}

TEST_CASE("search_exhaustive basics") {
    SUBCASE("no indexed query terms gives an empty list") {
        auto index = InvertedIndex::build({{"d1", "cat"}});
        std::vector<std::string> q = {"zebra"};
        CHECK(search_exhaustive(index, q, 5).entries.empty());
    }
    SUBCASE("matching both terms ranks first") {
        auto index = InvertedIndex::build({{"a", "cat"}, {"b", "dog"}, {"c", "cat dog"}});
        std::vector<std::string> q = {"cat", "dog"};
        auto result = search_exhaustive(index, q, 3);
        REQUIRE(!result.entries.empty());
        CHECK(result.entries[0].doc_id == "c");
        CHECK(result.entries.size() == 3);
    }
    SUBCASE("k larger than the match count truncates to the matches") {
        auto index = InvertedIndex::build({{"a", "cat"}, {"b", "dog"}});
        std::vector<std::string> q = {"cat"};
        CHECK(search_exhaustive(index, q, 100).entries.size() == 1);
    }
    SUBCASE("k must be positive") {
        auto index = InvertedIndex::build({{"a", "cat"}});
        std::vector<std::string> q = {"cat"};
        CHECK_THROWS_AS(search_exhaustive(index, q, 0), std::runtime_error);
    }
}

TEST_CASE("wand equals exhaustive on randomized corpora") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n_docs = 50 + rng.next_below(400);
        std::size_t vocab = 10 + rng.next_below(120);
        auto docs = random_corpus(rng, n_docs, vocab, 20);
        auto index = InvertedIndex::build(docs);
        for (int qi = 0; qi < 10; ++qi) {
            auto q = random_query(rng, vocab + 5, 6);  // some terms unindexed
            for (std::size_t k : {1, 3, 10, 100}) {
                auto a = search_exhaustive(index, q, k);
                auto b = search_wand(index, q, k);
                REQUIRE(same_ranking(a, b));
            }
        }
    }
}

TEST_CASE("wand equals exhaustive on duplicate-heavy corpora") {
    // many identical documents force exact score ties at the heap boundary
    SplitMix64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<TextRecord> docs;
        std::size_t n_groups = 3 + rng.next_below(5);
        std::size_t copies = 4 + rng.next_below(6);
        std::size_t id = 0;
        for (std::size_t g = 0; g < n_groups; ++g) {
            std::string text;
            std::size_t len = 1 + rng.next_below(4);
            for (std::size_t t = 0; t < len; ++t) {
                if (t) text += ' ';
                text += "t" + std::to_string(rng.next_below(6));
            }
            for (std::size_t c = 0; c < copies; ++c)
                docs.push_back({"doc" + std::to_string((id++ * 131) % 10000), text});
        }
        auto index = InvertedIndex::build(docs);
        for (int qi = 0; qi < 10; ++qi) {
            auto q = random_query(rng, 6, 4);
            for (std::size_t k : {1, 2, 5, 17}) {
                auto a = search_exhaustive(index, q, k);
                auto b = search_wand(index, q, k);
                REQUIRE(same_ranking(a, b));
            }
        }
    }
}

TEST_CASE("single-term wand trivially matches exhaustive") {
    SplitMix64 rng(3);
    auto docs = random_corpus(rng, 200, 30, 15);
    auto index = InvertedIndex::build(docs);
    std::vector<std::string> q = {"t4"};
    CHECK(same_ranking(search_exhaustive(index, q, 10), search_wand(index, q, 10)));
}

TEST_CASE("wand prunes") {
    SplitMix64 rng(5);
    auto docs = random_corpus(rng, 1000, 80, 25);
    auto index = InvertedIndex::build(docs);

    std::vector<std::string> q = {"t1", "t2", "t3"};
    SearchStats exhaustive_stats;
    SearchStats wand_stats;
    auto a = search_exhaustive(index, q, 1, &exhaustive_stats);
    auto b = search_wand(index, q, 1, &wand_stats);
    REQUIRE(same_ranking(a, b));
    CHECK(wand_stats.candidates == exhaustive_stats.candidates);
    CHECK(wand_stats.fully_scored <= exhaustive_stats.candidates);
    // the whole point: strictly fewer full evaluations on this instance
    CHECK(wand_stats.fully_scored < exhaustive_stats.candidates);
}

TEST_CASE("per-term bound dominates every contribution") {
    SplitMix64 rng(17);
    auto docs = random_corpus(rng, 300, 40, 18);
    auto index = InvertedIndex::build(docs);
    for (std::size_t t = 0; t < 40; ++t) {
        std::string term = "t" + std::to_string(t);
        const auto* tp = index.postings(term);
        if (!tp) continue;
        double idf = index.idf_for_df(tp->docs.size());
        for (const auto& p : tp->docs)
            CHECK(tp->max_score >= idf * index.tf_part(p.tf, index.doc_length(p.doc)));
    }
}

TEST_CASE("index serialization round trip") {
    TempDir tmp;
    SplitMix64 rng(31);
    auto docs = random_corpus(rng, 120, 25, 12);
    auto index = InvertedIndex::build(docs);
    auto path = tmp.file("index.bin");
    index.save(path);
    auto loaded = InvertedIndex::load(path);

    CHECK(loaded.doc_count() == index.doc_count());
    CHECK(loaded.avg_doc_length() == index.avg_doc_length());
    CHECK(loaded.vocab_size() == index.vocab_size());
    for (int qi = 0; qi < 20; ++qi) {
        auto q = random_query(rng, 25, 5);
        CHECK(same_ranking(search_wand(index, q, 10), search_wand(loaded, q, 10)));
    }

    SUBCASE("bad magic rejected") {
        auto bad = tmp.write("bad.bin", "NOTANIDX");
        CHECK_THROWS_AS(InvertedIndex::load(bad), std::runtime_error);
    }
}
