#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "retsel/corpus.hpp"
#include "retsel/labeling.hpp"

namespace retsel {

struct PerQueryRecall {
    std::string query_id;
    double sparse = 0.0;
    double alt = 0.0;  // dense recall or hybrid pool recall, per scheme
};

// Modeled per-query latency; under the hybrid scheme the sparse pass always
// runs and dense is sequential on top of it.
struct LatencyModel {
    double sparse_ms = 55.0;
    double dense_ms = 103.0;
};

struct CurvePoint {
    double f = 0.0;  // budget fraction of queries routed to ALT
    std::size_t n_alt = 0;
    double mean_recall = 0.0;
    double mean_latency_ms = 0.0;
};

struct TradeoffCurve {
    Scheme scheme = Scheme::Dense;
    std::string selector;
    std::vector<CurvePoint> points;  // f ascending
};

// |top-k(run) entries ∩ relevant| / |relevant|; the relevant set must be
// nonempty.
double recall_at_k(const RankedList& run, const std::set<std::string>& relevant, std::size_t k);

// whole-pool recall (hybrid union mode, no cutoff)
double recall_of_pool(const std::set<std::string>& pool, const std::set<std::string>& relevant);

// For each f in the grid, route the ceil(f*Q) queries with highest p_alt
// (ties by ascending query id) to the ALT strategy and average the chosen
// per-query recalls. Latency: dense scheme replaces the sparse pass,
// hybrid adds the dense pass on top of it.
TradeoffCurve budget_sweep(const ProbabilityMap& probs, const std::vector<PerQueryRecall>& recalls,
                           const LatencyModel& latency, Scheme scheme, std::span<const double> grid,
                           const std::string& selector_name);

// Closed-form expectation of random assignment at rate f; affine in f.
TradeoffCurve random_baseline(const std::vector<PerQueryRecall>& recalls, const LatencyModel& latency,
                              Scheme scheme, std::span<const double> grid);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

// Sampled validation of random_baseline: each trial assigns each query to
// ALT independently with probability f.
MonteCarloEstimate monte_carlo_baseline(const std::vector<PerQueryRecall>& recalls, Scheme scheme,
                                        double f, std::size_t trials, std::uint64_t seed);

struct ParetoPoint {
    double latency_ms = 0.0;
    double recall = 0.0;
    Scheme scheme = Scheme::Dense;
    std::string selector;
    double f = 0.0;
};

// Non-dominated subset (lower-or-equal latency and higher recall with one
// strict), sorted by latency ascending; recall strictly increases along the
// result. Exact duplicates keep their first occurrence.
std::vector<ParetoPoint> pareto_frontier(const std::vector<ParetoPoint>& points);

// curve CSV: header `scheme,selector,f,n_alt,mean_recall,mean_latency_ms`
void save_curves_csv(const std::string& path, const std::vector<TradeoffCurve>& curves,
                     const std::vector<std::string>& header = {});
std::vector<ParetoPoint> load_curve_csv(const std::string& path);

// pareto CSV: header `latency_ms,recall,scheme,selector,f`
void save_pareto_csv(const std::string& path, const std::vector<ParetoPoint>& points,
                     const std::vector<std::string>& header = {});

}  // namespace retsel
