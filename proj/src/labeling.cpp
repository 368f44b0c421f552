#include "retsel/labeling.hpp"

#include "retsel/common.hpp"

namespace retsel {

std::string to_string(Scheme scheme) { return scheme == Scheme::Dense ? "dense" : "hybrid"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "dense") return Scheme::Dense;
    if (s == "hybrid") return Scheme::Hybrid;
    fail("unknown scheme '" + s + "' (expected dense or hybrid)");
}

std::optional<std::size_t> first_relevant_rank(const RankedList& run,
                                               const std::set<std::string>& relevant) {
    if (relevant.empty()) fail("query '" + run.query_id + "' has no judgments");
    for (std::size_t i = 0; i < run.entries.size(); ++i)
        if (relevant.count(run.entries[i].doc_id)) return i + 1;
    return std::nullopt;
}

Strategy decide_strategy(std::optional<std::size_t> rank, std::size_t t) {
    if (t == 0) fail("threshold T must be >= 1");
    return (rank && *rank <= t) ? Strategy::Sparse : Strategy::Alt;
}

StrategyLabel label_query(const std::string& query_id, std::optional<std::size_t> rank,
                          std::size_t t, Scheme scheme) {
    StrategyLabel out;
    out.query_id = query_id;
    out.label = decide_strategy(rank, t);
    out.scheme = scheme;
    out.first_relevant = rank;
    out.threshold = t;
    return out;
}

LabelReport label_all(const RunMap& runs, const JudgmentSet& judgments, std::size_t t, Scheme scheme) {
    LabelReport report;
    for (const auto& [qid, run] : runs) {
        auto it = judgments.find(qid);
        if (it == judgments.end()) {
            report.skipped.push_back(qid);
            continue;
        }
        auto rank = first_relevant_rank(run, it->second);
        report.labels.emplace(qid, label_query(qid, rank, t, scheme));
    }
    return report;
}

std::set<std::string> HybridPool::doc_ids() const {
    std::set<std::string> out;
    for (const auto& [id, prov] : docs) out.insert(id);
    return out;
}

HybridPool merge_hybrid(const RankedList& sparse, const RankedList& dense) {
    if (sparse.query_id != dense.query_id)
        fail("cannot merge pools for different queries ('" + sparse.query_id + "' vs '" +
             dense.query_id + "')");
    HybridPool pool;
    pool.query_id = sparse.query_id;
    for (const auto& e : sparse.entries) pool.docs[e.doc_id].from_sparse = true;
    for (const auto& e : dense.entries) pool.docs[e.doc_id].from_dense = true;
    return pool;
}

void save_labels(const std::string& path, const LabelMap& labels, const std::vector<std::string>& header) {
    AtomicWriter w(path);
    w.write_header(header);
    for (const auto& [qid, l] : labels) {
        w.stream() << qid << '\t' << (l.label == Strategy::Sparse ? "SPARSE" : "ALT") << '\t';
        if (l.first_relevant)
            w.stream() << *l.first_relevant;
        else
            w.stream() << "NONE";
        w.stream() << '\t' << to_string(l.scheme) << '\t' << l.threshold << '\n';
    }
    w.commit();
}

LabelMap load_labels(const std::string& path) {
    LabelMap labels;
    for_each_data_line(path, [&](std::size_t line_no, const std::string& line) {
        auto fields = split(line, '\t');
        if (fields.size() != 5) fail_at(path, line_no, "expected `qid label rank scheme T`");
        StrategyLabel l;
        l.query_id = fields[0];
        if (fields[1] == "SPARSE")
            l.label = Strategy::Sparse;
        else if (fields[1] == "ALT")
            l.label = Strategy::Alt;
        else
            fail_at(path, line_no, "unknown label '" + fields[1] + "'");
        if (fields[2] != "NONE") {
            long long rank = 0;
            if (!parse_long(fields[2], rank) || rank < 1)
                fail_at(path, line_no, "bad rank '" + fields[2] + "'");
            l.first_relevant = static_cast<std::size_t>(rank);
        }
        l.scheme = scheme_from_string(fields[3]);
        long long t = 0;
        if (!parse_long(fields[4], t) || t < 1) fail_at(path, line_no, "bad threshold '" + fields[4] + "'");
        l.threshold = static_cast<std::size_t>(t);
        if (!labels.emplace(l.query_id, l).second)
            fail_at(path, line_no, "duplicate query id '" + l.query_id + "'");
    });
    return labels;
}

}  // namespace retsel
