#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "retsel/corpus.hpp"
#include "retsel/labeling.hpp"
#include "retsel/sparse_index.hpp"

namespace retsel {

// Feature layout per scheme. The dense-scheme selector runs before any
// retrieval, so it sees only the query and index statistics; the hybrid
// selector runs after the sparse pass and additionally sees the sparse
// result list and the top retrieved document.
std::vector<std::string> feature_names(Scheme scheme);

// sparse_run: required for Scheme::Hybrid, ignored for Scheme::Dense.
// top_doc: the text of the first sparse result; required for Scheme::Hybrid
// whenever the run is nonempty, ignored for Scheme::Dense.
std::vector<double> featurize(const TextRecord& query, const InvertedIndex& index,
                              const RankedList* sparse_run, const TextRecord* top_doc,
                              Scheme scheme);

// Logistic regression over standardized features; standardization constants
// live in the model so a saved model is self-contained.
struct LinearModel {
    Scheme scheme = Scheme::Dense;
    std::vector<std::string> names;
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> mean;
    std::vector<double> stdev;  // constant features carry 1

    // sigmoid(w . standardize(x) + b); throws on length mismatch
    double predict(std::span<const double> raw_features) const;
};

struct TrainOptions {
    double learning_rate = 0.5;
    std::size_t epochs = 500;
    double l2 = 0.0;
    std::uint64_t seed = 0;
};

struct TrainResult {
    LinearModel model;
    std::vector<double> loss_history;  // one entry per epoch, post-update
    double final_loss = 0.0;
};

// Full-batch gradient descent on binary cross entropy (label 1 = ALT).
// Requires at least two examples and both classes present.
TrainResult train_selector(const std::vector<std::vector<double>>& features,
                           const std::vector<int>& labels, Scheme scheme, TrainOptions opts = {});

// BCE loss and gradient on already-standardized features; exposed so the
// gradient can be checked against finite differences.
double bce_loss(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                std::span<const double> weights, double bias, double l2);
void bce_gradient(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                  std::span<const double> weights, double bias, double l2,
                  std::vector<double>& grad_w, double& grad_b);

// p_alt = 1 for ALT-labeled queries, 0 for SPARSE-labeled.
ProbabilityMap oracle_selector(const LabelMap& labels);

// i.i.d. uniform [0,1) per query from a seeded generator; independent of the
// order queries are supplied in.
ProbabilityMap random_selector(const std::vector<std::string>& qids, std::uint64_t seed);

// externally produced probabilities (any classifier that emits a p per query)
ProbabilityMap import_selector(const std::string& path);

// model.tsv: per-feature `name<TAB>weight<TAB>mean<TAB>stdev` rows plus
// `__scheme__` and `__bias__` rows.
void save_model(const std::string& path, const LinearModel& model,
                const std::vector<std::string>& header = {});
LinearModel load_model(const std::string& path);

}  // namespace retsel
