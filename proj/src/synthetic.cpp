#include "retsel/synthetic.hpp"

#include <algorithm>
#include <cstdio>

#include "retsel/common.hpp"

namespace retsel {

namespace {

std::string zero_padded(const char* prefix, std::size_t i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, i);
    return buf;
}

std::string filler_token(std::size_t i) { return zero_padded("w", i, 4); }

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    std::size_t planted = spec.n_exact + spec.n_mismatch + spec.n_unanswerable;
    if (planted == 0) fail("no queries requested");
    if (planted > spec.n_docs) fail("more planted queries than documents");
    if (spec.vocab == 0) fail("vocabulary must be nonempty");
    if (spec.doc_len_min < 4 || spec.doc_len_max < spec.doc_len_min)
        fail("doc length range must satisfy 4 <= min <= max");

    SplitMix64 rng(mix64(spec.seed));
    auto doc_len = [&] {
        return spec.doc_len_min + rng.next_below(spec.doc_len_max - spec.doc_len_min + 1);
    };
    auto filler = [&] { return filler_token(rng.next_below(spec.vocab)); };

    // scatter the planted passages across the collection
    std::vector<std::size_t> positions(spec.n_docs);
    for (std::size_t i = 0; i < spec.n_docs; ++i) positions[i] = i;
    for (std::size_t i = spec.n_docs - 1; i > 0; --i)
        std::swap(positions[i], positions[rng.next_below(i + 1)]);
    // planted query j lives at positions[j]
    std::vector<std::size_t> owner(spec.n_docs, planted);  // `planted` marks a pure filler doc
    for (std::size_t j = 0; j < planted; ++j) owner[positions[j]] = j;

    SyntheticData data;
    data.collection.reserve(spec.n_docs);
    data.queries.reserve(planted);

    struct QuerySlot {
        std::string qid;
        std::string text;
    };
    std::vector<QuerySlot> queries(planted);

    for (std::size_t pos = 0; pos < spec.n_docs; ++pos) {
        std::string doc_id = zero_padded("d", pos, 6);
        std::size_t j = owner[pos];
        std::vector<std::string> tokens;
        std::size_t len = doc_len();

        if (j == planted) {
            for (std::size_t t = 0; t < len; ++t) tokens.push_back(filler());
        } else if (j < spec.n_exact) {
            std::size_t i = j;
            std::string kw_a = zero_padded("ek", i, 3) + "a";
            std::string kw_b = zero_padded("ek", i, 3) + "b";
            tokens.push_back(kw_a);
            tokens.push_back(kw_b);
            for (std::size_t t = 2; t < len; ++t) tokens.push_back(filler());
            // query: the two rare keywords plus one filler taken from the doc
            std::string q = kw_a + " " + kw_b + " " + tokens[2 + rng.next_below(len - 2)];
            queries[j] = {zero_padded("qe", i, 3), q};
            data.qrels[queries[j].qid].insert(doc_id);
        } else if (j < spec.n_exact + spec.n_mismatch) {
            std::size_t i = j - spec.n_exact;
            std::string stem = zero_padded("mc", i, 3);
            std::string qstem = zero_padded("mq", i, 3);
            std::string qtext;
            for (char suffix : {'a', 'b', 'c'}) {
                std::string content = stem + suffix;
                std::string alias = qstem + suffix;
                tokens.push_back(content);
                data.aliases[alias] = content;
                if (!qtext.empty()) qtext += ' ';
                qtext += alias;
            }
            for (std::size_t t = 3; t < len; ++t) tokens.push_back(filler());
            queries[j] = {zero_padded("qm", i, 3), qtext};
            data.qrels[queries[j].qid].insert(doc_id);
        } else {
            std::size_t i = j - spec.n_exact - spec.n_mismatch;
            tokens.push_back(zero_padded("uc", i, 3));
            for (std::size_t t = 1; t < len; ++t) tokens.push_back(filler());
            std::string qstem = zero_padded("uq", i, 3);
            queries[j] = {zero_padded("qu", i, 3), qstem + "a " + qstem + "b " + qstem + "c"};
            data.qrels[queries[j].qid].insert(doc_id);
        }

        std::string text;
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            if (t) text += ' ';
            text += tokens[t];
        }
        data.collection.push_back(TextRecord{std::move(doc_id), std::move(text)});
    }

    for (auto& q : queries) data.queries.push_back(TextRecord{std::move(q.qid), std::move(q.text)});
    return data;
}

}  // namespace retsel
