#include "retsel/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "retsel/common.hpp"

namespace retsel {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            current.push_back(static_cast<char>(c));
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> unique_terms(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    std::unordered_set<std::string_view> seen;
    for (const auto& t : tokens) {
        if (seen.insert(t).second) out.push_back(t);
    }
    return out;
}

namespace {

bool ranked_before(const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
}

}  // namespace

void RankedList::normalize() {
    std::sort(entries.begin(), entries.end(), ranked_before);
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].doc_id == entries[i - 1].doc_id)
            fail("duplicate doc id '" + entries[i].doc_id + "' in ranked list for query '" + query_id + "'");
    }
    if (cutoff == 0) cutoff = entries.size();
    if (entries.size() > cutoff) entries.resize(cutoff);
}

std::vector<TextRecord> load_collection(const std::string& path) {
    std::vector<TextRecord> records;
    std::unordered_set<std::string> seen;
    for_each_data_line(path, [&](std::size_t line_no, const std::string& line) {
        auto fields = split(line, '\t');
        if (fields.size() != 2) fail_at(path, line_no, "expected `id<TAB>text`");
        if (fields[0].empty()) fail_at(path, line_no, "empty id");
        if (!seen.insert(fields[0]).second) fail_at(path, line_no, "duplicate id '" + fields[0] + "'");
        records.push_back(TextRecord{std::move(fields[0]), std::move(fields[1])});
    });
    return records;
}

void save_collection(const std::string& path, const std::vector<TextRecord>& records,
                     const std::vector<std::string>& header) {
    AtomicWriter w(path);
    w.write_header(header);
    for (const auto& r : records) w.stream() << r.id << '\t' << r.text << '\n';
    w.commit();
}

JudgmentSet load_qrels(const std::string& path, int min_grade) {
    JudgmentSet qrels;
    for_each_data_line(path, [&](std::size_t line_no, const std::string& line) {
        auto fields = split_ws(line);
        if (fields.size() != 4) fail_at(path, line_no, "expected `qid 0 docid grade`");
        long long grade = 0;
        if (!parse_long(fields[3], grade)) fail_at(path, line_no, "non-integer grade '" + fields[3] + "'");
        if (grade >= min_grade) qrels[fields[0]].insert(fields[2]);
    });
    return qrels;
}

void save_qrels(const std::string& path, const JudgmentSet& qrels, const std::vector<std::string>& header) {
    AtomicWriter w(path);
    w.write_header(header);
    for (const auto& [qid, docs] : qrels)
        for (const auto& d : docs) w.stream() << qid << " 0 " << d << " 1\n";
    w.commit();
}

RunMap load_run(const std::string& path) {
    RunMap runs;
    std::map<std::string, std::unordered_set<std::string>> seen;
    for_each_data_line(path, [&](std::size_t line_no, const std::string& line) {
        auto fields = split_ws(line);
        if (fields.size() != 6) fail_at(path, line_no, "expected `qid Q0 docid rank score tag`");
        long long rank = 0;
        if (!parse_long(fields[3], rank)) fail_at(path, line_no, "unparsable rank '" + fields[3] + "'");
        double score = 0.0;
        if (!parse_double(fields[4], score)) fail_at(path, line_no, "unparsable score '" + fields[4] + "'");
        if (!seen[fields[0]].insert(fields[2]).second)
            fail_at(path, line_no, "duplicate doc id '" + fields[2] + "' for query '" + fields[0] + "'");
        auto& rl = runs[fields[0]];
        rl.query_id = fields[0];
        rl.entries.push_back(ScoredDoc{fields[2], score});
    });
    for (auto& [qid, rl] : runs) rl.normalize();
    return runs;
}

void save_run(const std::string& path, const RunMap& runs, const std::string& tag,
              const std::vector<std::string>& header) {
    AtomicWriter w(path);
    w.write_header(header);
    for (const auto& [qid, rl] : runs) {
        std::size_t rank = 1;
        for (const auto& e : rl.entries)
            w.stream() << qid << " Q0 " << e.doc_id << ' ' << rank++ << ' ' << format_fixed(e.score) << ' '
                       << tag << '\n';
    }
    w.commit();
}

ProbabilityMap load_probabilities(const std::string& path) {
    ProbabilityMap probs;
    for_each_data_line(path, [&](std::size_t line_no, const std::string& line) {
        auto fields = split(line, '\t');
        if (fields.size() != 2) fail_at(path, line_no, "expected `qid<TAB>p_alt`");
        double p = 0.0;
        if (!parse_double(fields[1], p)) fail_at(path, line_no, "unparsable probability '" + fields[1] + "'");
        if (!(p >= 0.0 && p <= 1.0)) fail_at(path, line_no, "probability " + fields[1] + " outside [0,1]");
        if (!probs.emplace(fields[0], p).second) fail_at(path, line_no, "duplicate query id '" + fields[0] + "'");
    });
    return probs;
}

void save_probabilities(const std::string& path, const ProbabilityMap& probs,
                        const std::vector<std::string>& header) {
    AtomicWriter w(path);
    w.write_header(header);
    for (const auto& [qid, p] : probs) w.stream() << qid << '\t' << format_fixed(p) << '\n';
    w.commit();
}

}  // namespace retsel
