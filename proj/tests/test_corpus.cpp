#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <retsel/common.hpp>
#include <retsel/corpus.hpp>

#include "test_util.hpp"

using namespace retsel;
using retsel::testing::TempDir;

TEST_CASE("tokenize basics") {
    CHECK(tokenize("Hello, World!") == std::vector<std::string>{"hello", "world"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("BM25-based retrieval") == std::vector<std::string>{"bm25", "based", "retrieval"});
    CHECK(tokenize("   \t\n ") == std::vector<std::string>{});
    CHECK(tokenize("a1b2") == std::vector<std::string>{"a1b2"});
    // non-ASCII bytes separate tokens
    CHECK(tokenize("caf\xc3\xa9 bar") == std::vector<std::string>{"caf", "bar"});
}

TEST_CASE("tokenize is idempotent on its own output") {
    SplitMix64 rng(123);
    const std::string alphabet = "abcZ09 ,.!-_\t\xc3\xa9";
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        std::size_t len = rng.next_below(40);
        for (std::size_t i = 0; i < len; ++i) text.push_back(alphabet[rng.next_below(alphabet.size())]);
        auto once = tokenize(text);
        std::string joined;
        for (const auto& t : once) {
            if (!joined.empty()) joined += ' ';
            joined += t;
        }
        CHECK(tokenize(joined) == once);
    }
}

TEST_CASE("unique_terms keeps first-appearance order") {
    CHECK(unique_terms({"b", "a", "b", "c", "a"}) == std::vector<std::string>{"b", "a", "c"});
}

TEST_CASE("load_collection") {
    TempDir tmp;

    SUBCASE("single line") {
        auto p = tmp.write("c.tsv", "d1\tcat sat\n");
        auto recs = load_collection(p);
        REQUIRE(recs.size() == 1);
        CHECK(recs[0].id == "d1");
        CHECK(recs[0].text == "cat sat");
    }
    SUBCASE("duplicate id reports the offending line") {
        auto p = tmp.write("c.tsv", "d1\tcat\nd1\tdog\n");
        CHECK_THROWS_WITH_AS(load_collection(p), doctest::Contains(":2:"), std::runtime_error);
    }
    SUBCASE("malformed line") {
        auto p = tmp.write("c.tsv", "d1\tcat\td2\n");
        CHECK_THROWS_AS(load_collection(p), std::runtime_error);
    }
    SUBCASE("missing text field") {
        auto p = tmp.write("c.tsv", "d1\n");
        CHECK_THROWS_AS(load_collection(p), std::runtime_error);
    }
    SUBCASE("empty file") {
        auto p = tmp.write("c.tsv", "");
        CHECK(load_collection(p).empty());
    }
    SUBCASE("comment header is skipped") {
        auto p = tmp.write("c.tsv", "# generator=test\nd1\tcat\n");
        CHECK(load_collection(p).size() == 1);
    }
    SUBCASE("round trip") {
        std::vector<TextRecord> recs = {{"d1", "cat sat"}, {"d2", ""}};
        auto p = tmp.file("out.tsv");
        save_collection(p, recs, {"seed=1"});
        auto back = load_collection(p);
        REQUIRE(back.size() == 2);
        CHECK(back[1].text == "");
    }
}

TEST_CASE("load_qrels") {
    TempDir tmp;

    SUBCASE("single judgment") {
        auto p = tmp.write("q.txt", "q1 0 d1 1\n");
        auto qrels = load_qrels(p, 1);
        REQUIRE(qrels.count("q1"));
        CHECK(qrels["q1"] == std::set<std::string>{"d1"});
    }
    SUBCASE("below threshold") {
        auto p = tmp.write("q.txt", "q1 0 d1 0\n");
        CHECK(load_qrels(p, 1).empty());
    }
    SUBCASE("set union") {
        auto p = tmp.write("q.txt", "q1 0 d1 1\nq1 0 d2 2\n");
        CHECK(load_qrels(p, 1)["q1"] == std::set<std::string>{"d1", "d2"});
    }
    SUBCASE("non-integer grade") {
        auto p = tmp.write("q.txt", "q1 0 d1 x\n");
        CHECK_THROWS_WITH_AS(load_qrels(p, 1), doctest::Contains(":1:"), std::runtime_error);
    }
    SUBCASE("graded threshold") {
        auto p = tmp.write("q.txt", "q1 0 d1 1\nq1 0 d2 2\n");
        auto qrels = load_qrels(p, 2);
        CHECK(qrels["q1"] == std::set<std::string>{"d2"});
    }
}

TEST_CASE("run file round trip and ordering") {
    TempDir tmp;

    SUBCASE("save then load is identity") {
        RunMap runs;
        RankedList rl;
        rl.query_id = "q1";
        rl.entries = {{"d2", 3.5}, {"d1", 1.25}};
        rl.cutoff = 10;
        runs["q1"] = rl;
        auto p = tmp.file("run.txt");
        save_run(p, runs, "tag");
        auto back = load_run(p);
        REQUIRE(back.count("q1"));
        CHECK(back["q1"].entries == rl.entries);
    }
    SUBCASE("unparsable rank names the line") {
        auto p = tmp.write("run.txt", "q1 Q0 d1 x 1.0 tag\n");
        CHECK_THROWS_WITH_AS(load_run(p), doctest::Contains(":1:"), std::runtime_error);
    }
    SUBCASE("unparsable score names the line") {
        auto p = tmp.write("run.txt", "q1 Q0 d1 1 bad tag\n");
        CHECK_THROWS_WITH_AS(load_run(p), doctest::Contains(":1:"), std::runtime_error);
    }
    SUBCASE("score ties break by ascending doc id") {
        auto p = tmp.write("run.txt", "q1 Q0 d2 1 2.0 t\nq1 Q0 d1 2 2.0 t\n");
        auto runs = load_run(p);
        REQUIRE(runs["q1"].entries.size() == 2);
        CHECK(runs["q1"].entries[0].doc_id == "d1");
        CHECK(runs["q1"].entries[1].doc_id == "d2");
    }
    SUBCASE("duplicate doc id rejected") {
        auto p = tmp.write("run.txt", "q1 Q0 d1 1 2.0 t\nq1 Q0 d1 2 1.0 t\n");
        CHECK_THROWS_WITH_AS(load_run(p), doctest::Contains(":2:"), std::runtime_error);
    }
}

TEST_CASE("run round trip on randomized inputs") {
    TempDir tmp;
    SplitMix64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        RunMap runs;
        std::size_t n_queries = 1 + rng.next_below(4);
        for (std::size_t qi = 0; qi < n_queries; ++qi) {
            RankedList rl;
            rl.query_id = "q" + std::to_string(qi);
            std::size_t n = rng.next_below(30);
            for (std::size_t i = 0; i < n; ++i) {
                // quantized scores create plenty of ties; six decimals survive
                // the text round trip exactly
                double score = static_cast<double>(rng.next_below(8)) / 4.0;
                rl.entries.push_back({"d" + std::to_string(i), score});
            }
            rl.normalize();
            runs[rl.query_id] = rl;
        }
        auto p = tmp.file("run" + std::to_string(trial) + ".txt");
        save_run(p, runs, "t");
        auto back = load_run(p);
        std::size_t expected = 0;
        for (auto& [qid, rl] : runs)
            if (!rl.entries.empty()) ++expected;
        CHECK(back.size() == expected);
        for (auto& [qid, rl] : back) CHECK(rl.entries == runs[qid].entries);
    }
}

TEST_CASE("probability file") {
    TempDir tmp;

    SUBCASE("valid") {
        auto p = tmp.write("p.tsv", "q1\t0.25\nq2\t1.0\n");
        auto probs = load_probabilities(p);
        CHECK(probs["q1"] == doctest::Approx(0.25));
    }
    SUBCASE("out of range value names the line") {
        auto p = tmp.write("p.tsv", "q1\t1.5\n");
        CHECK_THROWS_WITH_AS(load_probabilities(p), doctest::Contains(":1:"), std::runtime_error);
    }
    SUBCASE("round trip") {
        ProbabilityMap probs{{"q1", 0.125}, {"q2", 0.0}};
        auto p = tmp.file("p.tsv");
        save_probabilities(p, probs);
        CHECK(load_probabilities(p) == probs);
    }
}

TEST_CASE("ranked list normalize rejects duplicates and truncates") {
    RankedList rl;
    rl.query_id = "q";
    rl.entries = {{"a", 1.0}, {"b", 2.0}, {"c", 1.5}};
    rl.cutoff = 2;
    rl.normalize();
    REQUIRE(rl.entries.size() == 2);
    CHECK(rl.entries[0].doc_id == "b");
    CHECK(rl.entries[1].doc_id == "c");

    RankedList dup;
    dup.entries = {{"a", 1.0}, {"a", 2.0}};
    CHECK_THROWS_AS(dup.normalize(), std::runtime_error);
}
