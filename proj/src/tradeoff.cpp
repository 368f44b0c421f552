#include "retsel/tradeoff.hpp"

#include <algorithm>
#include <cmath>

#include "retsel/common.hpp"

namespace retsel {

double recall_at_k(const RankedList& run, const std::set<std::string>& relevant, std::size_t k) {
    if (relevant.empty()) fail("query '" + run.query_id + "' has no judgments");
    if (k == 0) fail("k must be >= 1");
    std::size_t n = std::min(k, run.entries.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (relevant.count(run.entries[i].doc_id)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double recall_of_pool(const std::set<std::string>& pool, const std::set<std::string>& relevant) {
    if (relevant.empty()) fail("empty relevant set");
    std::size_t hits = 0;
    for (const auto& d : relevant)
        if (pool.count(d)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

namespace {

void check_grid(std::span<const double> grid) {
    if (grid.empty()) fail("empty budget grid");
    double prev = -1.0;
    for (double f : grid) {
        if (!(f >= 0.0 && f <= 1.0)) fail("budget fraction " + std::to_string(f) + " outside [0,1]");
        if (f < prev) fail("budget grid must be sorted ascending");
        prev = f;
    }
}

std::vector<PerQueryRecall> sorted_by_qid(std::vector<PerQueryRecall> recalls) {
    std::sort(recalls.begin(), recalls.end(),
              [](const PerQueryRecall& a, const PerQueryRecall& b) { return a.query_id < b.query_id; });
    for (std::size_t i = 1; i < recalls.size(); ++i)
        if (recalls[i].query_id == recalls[i - 1].query_id)
            fail("duplicate query id '" + recalls[i].query_id + "' in recall table");
    return recalls;
}

std::size_t budget_count(double f, std::size_t q) {
    // ceil(f*Q) in real arithmetic; the epsilon absorbs binary representation
    // noise such as 0.05*200 -> 10.000000000000002
    double raw = f * static_cast<double>(q);
    auto n = static_cast<long long>(std::ceil(raw - 1e-9));
    if (n < 0) n = 0;
    if (n > static_cast<long long>(q)) n = static_cast<long long>(q);
    return static_cast<std::size_t>(n);
}

double mean_latency_for(Scheme scheme, const LatencyModel& latency, double alt_fraction) {
    if (scheme == Scheme::Dense)
        return (1.0 - alt_fraction) * latency.sparse_ms + alt_fraction * latency.dense_ms;
    return latency.sparse_ms + alt_fraction * latency.dense_ms;
}

}  // namespace

TradeoffCurve budget_sweep(const ProbabilityMap& probs, const std::vector<PerQueryRecall>& recalls_in,
                           const LatencyModel& latency, Scheme scheme, std::span<const double> grid,
                           const std::string& selector_name) {
    check_grid(grid);
    if (!(latency.sparse_ms > 0.0 && latency.dense_ms > 0.0)) fail("latencies must be positive");
    auto recalls = sorted_by_qid(recalls_in);
    if (recalls.empty()) fail("no queries to sweep");

    std::vector<std::string> missing_probs;
    for (const auto& r : recalls)
        if (!probs.count(r.query_id)) missing_probs.push_back(r.query_id);
    std::vector<std::string> missing_recalls;
    {
        std::set<std::string> have;
        for (const auto& r : recalls) have.insert(r.query_id);
        for (const auto& [qid, p] : probs)
            if (!have.count(qid)) missing_recalls.push_back(qid);
    }
    if (!missing_probs.empty() || !missing_recalls.empty()) {
        std::string msg = "probability/recall coverage mismatch;";
        auto list_some = [](const std::vector<std::string>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size() && i < 5; ++i) s += " " + v[i];
            if (v.size() > 5) s += " ... (" + std::to_string(v.size()) + " total)";
            return s;
        };
        if (!missing_probs.empty()) msg += " missing probabilities for:" + list_some(missing_probs);
        if (!missing_recalls.empty()) msg += " missing recalls for:" + list_some(missing_recalls);
        fail(msg);
    }

    // selection order: highest p_alt first, ties by ascending query id
    std::size_t q = recalls.size();
    std::vector<std::size_t> order(q);
    for (std::size_t i = 0; i < q; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double pa = probs.at(recalls[a].query_id);
        double pb = probs.at(recalls[b].query_id);
        if (pa != pb) return pa > pb;
        return recalls[a].query_id < recalls[b].query_id;
    });
    std::vector<std::size_t> selection_rank(q);
    for (std::size_t pos = 0; pos < q; ++pos) selection_rank[order[pos]] = pos;

    TradeoffCurve curve;
    curve.scheme = scheme;
    curve.selector = selector_name;
    for (double f : grid) {
        std::size_t n = budget_count(f, q);
        // fixed ascending-qid summation order keeps the f=0 / f=1 endpoints
        // bit-identical to plain pure-strategy means
        double total = 0.0;
        for (std::size_t i = 0; i < q; ++i)
            total += selection_rank[i] < n ? recalls[i].alt : recalls[i].sparse;
        CurvePoint pt;
        pt.f = f;
        pt.n_alt = n;
        pt.mean_recall = total / static_cast<double>(q);
        pt.mean_latency_ms =
            mean_latency_for(scheme, latency, static_cast<double>(n) / static_cast<double>(q));
        curve.points.push_back(pt);
    }
    return curve;
}

TradeoffCurve random_baseline(const std::vector<PerQueryRecall>& recalls_in, const LatencyModel& latency,
                              Scheme scheme, std::span<const double> grid) {
    check_grid(grid);
    if (!(latency.sparse_ms > 0.0 && latency.dense_ms > 0.0)) fail("latencies must be positive");
    auto recalls = sorted_by_qid(recalls_in);
    if (recalls.empty()) fail("no queries to sweep");

    double sum_sparse = 0.0;
    double sum_alt = 0.0;
    for (const auto& r : recalls) {
        sum_sparse += r.sparse;
        sum_alt += r.alt;
    }
    double q = static_cast<double>(recalls.size());
    double mean_sparse = sum_sparse / q;
    double mean_alt = sum_alt / q;

    TradeoffCurve curve;
    curve.scheme = scheme;
    curve.selector = "random-baseline";
    for (double f : grid) {
        CurvePoint pt;
        pt.f = f;
        pt.n_alt = budget_count(f, recalls.size());
        pt.mean_recall = (1.0 - f) * mean_sparse + f * mean_alt;
        pt.mean_latency_ms = mean_latency_for(scheme, latency, f);
        curve.points.push_back(pt);
    }
    return curve;
}

MonteCarloEstimate monte_carlo_baseline(const std::vector<PerQueryRecall>& recalls_in, Scheme scheme,
                                        double f, std::size_t trials, std::uint64_t seed) {
    (void)scheme;  // recall does not depend on the scheme's latency rule
    if (trials == 0) fail("trials must be >= 1");
    if (!(f >= 0.0 && f <= 1.0)) fail("budget fraction outside [0,1]");
    auto recalls = sorted_by_qid(recalls_in);
    if (recalls.empty()) fail("no queries");

    SplitMix64 rng(mix64(seed));
    double q = static_cast<double>(recalls.size());
    std::vector<double> means(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        double total = 0.0;
        for (const auto& r : recalls) total += rng.next_double() < f ? r.alt : r.sparse;
        means[t] = total / q;
    }
    MonteCarloEstimate est;
    est.trials = trials;
    bool all_equal = std::all_of(means.begin(), means.end(), [&](double m) { return m == means[0]; });
    if (all_equal) {
        // degenerate rates (f = 0 or 1) must report the pure mean exactly
        est.mean = means[0];
        return est;
    }
    for (double m : means) est.mean += m;
    est.mean /= static_cast<double>(trials);
    if (trials >= 2) {
        double ss = 0.0;
        for (double m : means) {
            double d = m - est.mean;
            ss += d * d;
        }
        est.std_error = std::sqrt(ss / static_cast<double>(trials - 1)) /
                        std::sqrt(static_cast<double>(trials));
    }
    return est;
}

std::vector<ParetoPoint> pareto_frontier(const std::vector<ParetoPoint>& points) {
    std::vector<ParetoPoint> sorted = points;
    // stable: among exact (latency, recall) duplicates the first input wins
    std::stable_sort(sorted.begin(), sorted.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        if (a.latency_ms != b.latency_ms) return a.latency_ms < b.latency_ms;
        return a.recall > b.recall;
    });
    std::vector<ParetoPoint> frontier;
    double best_recall = -1.0;
    for (const auto& p : sorted) {
        if (p.recall > best_recall) {
            frontier.push_back(p);
            best_recall = p.recall;
        }
    }
    return frontier;
}

void save_curves_csv(const std::string& path, const std::vector<TradeoffCurve>& curves,
                     const std::vector<std::string>& header) {
    AtomicWriter w(path);
    w.write_header(header);
    w.stream() << "scheme,selector,f,n_alt,mean_recall,mean_latency_ms\n";
    for (const auto& curve : curves) {
        if (curve.selector.find(',') != std::string::npos)
            fail("selector name '" + curve.selector + "' may not contain commas");
        for (const auto& pt : curve.points) {
            w.stream() << to_string(curve.scheme) << ',' << curve.selector << ',' << format_fixed(pt.f)
                       << ',' << pt.n_alt << ',' << format_fixed(pt.mean_recall) << ','
                       << format_fixed(pt.mean_latency_ms) << '\n';
        }
    }
    w.commit();
}

std::vector<ParetoPoint> load_curve_csv(const std::string& path) {
    std::vector<ParetoPoint> points;
    bool saw_header = false;
    for_each_data_line(path, [&](std::size_t line_no, const std::string& line) {
        auto fields = split(line, ',');
        if (!saw_header) {
            if (line != "scheme,selector,f,n_alt,mean_recall,mean_latency_ms")
                fail_at(path, line_no, "unexpected curve CSV header");
            saw_header = true;
            return;
        }
        if (fields.size() != 6) fail_at(path, line_no, "expected 6 columns");
        ParetoPoint p;
        p.scheme = scheme_from_string(fields[0]);
        p.selector = fields[1];
        if (!parse_double(fields[2], p.f) || !parse_double(fields[4], p.recall) ||
            !parse_double(fields[5], p.latency_ms))
            fail_at(path, line_no, "unparsable numeric field");
        points.push_back(std::move(p));
    });
    if (!saw_header) fail(path + ": empty curve CSV");
    return points;
}

void save_pareto_csv(const std::string& path, const std::vector<ParetoPoint>& points,
                     const std::vector<std::string>& header) {
    AtomicWriter w(path);
    w.write_header(header);
    w.stream() << "latency_ms,recall,scheme,selector,f\n";
    for (const auto& p : points) {
        w.stream() << format_fixed(p.latency_ms) << ',' << format_fixed(p.recall) << ','
                   << to_string(p.scheme) << ',' << p.selector << ',' << format_fixed(p.f) << '\n';
    }
    w.commit();
}

}  // namespace retsel
