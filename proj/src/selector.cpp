#include "retsel/selector.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "retsel/common.hpp"

namespace retsel {

std::vector<std::string> feature_names(Scheme scheme) {
    std::vector<std::string> names = {"query_len", "idf_mean", "idf_max", "idf_min", "oov_frac"};
    if (scheme == Scheme::Hybrid) {
        names.insert(names.end(), {"top1_score", "score_gap", "top_doc_overlap", "top_doc_len"});
    }
    return names;
}

std::vector<double> featurize(const TextRecord& query, const InvertedIndex& index,
                              const RankedList* sparse_run, const TextRecord* top_doc,
                              Scheme scheme) {
    auto tokens = tokenize(query.text);
    auto terms = unique_terms(tokens);

    double idf_sum = 0.0;
    double idf_max = 0.0;
    double idf_min = 0.0;
    std::size_t indexed = 0;
    for (const auto& t : terms) {
        std::size_t df = index.df(t);
        if (df == 0) continue;
        double idf = index.idf_for_df(df);
        if (indexed == 0) {
            idf_max = idf_min = idf;
        } else {
            idf_max = std::max(idf_max, idf);
            idf_min = std::min(idf_min, idf);
        }
        idf_sum += idf;
        ++indexed;
    }
    double idf_mean = indexed ? idf_sum / static_cast<double>(indexed) : 0.0;
    // a query with no indexed terms (including an empty query) is fully
    // out of vocabulary
    double oov_frac =
        terms.empty() ? 1.0
                      : static_cast<double>(terms.size() - indexed) / static_cast<double>(terms.size());

    std::vector<double> features = {static_cast<double>(tokens.size()), idf_mean, idf_max, idf_min,
                                    oov_frac};
    if (scheme == Scheme::Dense) return features;

    if (!sparse_run) fail("hybrid featurize requires the sparse run for query '" + query.id + "'");
    double top1 = 0.0;
    double gap = 0.0;
    double overlap = 0.0;
    double top_len = 0.0;
    if (!sparse_run->entries.empty()) {
        if (!top_doc) fail("hybrid featurize requires the top document text for query '" + query.id + "'");
        if (top_doc->id != sparse_run->entries[0].doc_id)
            fail("top document '" + top_doc->id + "' does not match the run's first entry '" +
                 sparse_run->entries[0].doc_id + "'");
        top1 = sparse_run->entries[0].score;
        if (sparse_run->entries.size() >= 2) gap = top1 - sparse_run->entries[1].score;
        auto doc_terms = unique_terms(tokenize(top_doc->text));
        std::unordered_set<std::string_view> doc_set(doc_terms.begin(), doc_terms.end());
        if (!terms.empty()) {
            std::size_t shared = 0;
            for (const auto& t : terms)
                if (doc_set.count(t)) ++shared;
            overlap = static_cast<double>(shared) / static_cast<double>(terms.size());
        }
        top_len = static_cast<double>(tokenize(top_doc->text).size());
    }
    features.insert(features.end(), {top1, gap, overlap, top_len});
    return features;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + e^z) without overflow; bce per-example loss is softplus(z) - y*z
double softplus(double z) {
    if (z > 0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

void standardize_stats(const std::vector<std::vector<double>>& x, std::vector<double>& mean,
                       std::vector<double>& stdev) {
    std::size_t n = x.size();
    std::size_t d = x[0].size();
    mean.assign(d, 0.0);
    stdev.assign(d, 0.0);
    for (const auto& row : x)
        for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
    for (const auto& row : x)
        for (std::size_t j = 0; j < d; ++j) {
            double diff = row[j] - mean[j];
            stdev[j] += diff * diff;
        }
    for (std::size_t j = 0; j < d; ++j) {
        stdev[j] = std::sqrt(stdev[j] / static_cast<double>(n));
        if (stdev[j] <= 0.0) stdev[j] = 1.0;  // constant feature
    }
}

}  // namespace

double bce_loss(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                std::span<const double> weights, double bias, double l2) {
    std::size_t n = x.size();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double z = bias;
        for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[i][j];
        loss += softplus(z) - static_cast<double>(y[i]) * z;
    }
    loss /= static_cast<double>(n);
    double reg = 0.0;
    for (double w : weights) reg += w * w;
    return loss + 0.5 * l2 * reg;
}

void bce_gradient(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                  std::span<const double> weights, double bias, double l2,
                  std::vector<double>& grad_w, double& grad_b) {
    std::size_t n = x.size();
    grad_w.assign(weights.size(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double z = bias;
        for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[i][j];
        double err = sigmoid(z) - static_cast<double>(y[i]);
        for (std::size_t j = 0; j < weights.size(); ++j) grad_w[j] += err * x[i][j];
        grad_b += err;
    }
    for (std::size_t j = 0; j < weights.size(); ++j)
        grad_w[j] = grad_w[j] / static_cast<double>(n) + l2 * weights[j];
    grad_b /= static_cast<double>(n);
}

TrainResult train_selector(const std::vector<std::vector<double>>& features,
                           const std::vector<int>& labels, Scheme scheme, TrainOptions opts) {
    auto names = feature_names(scheme);
    if (features.size() != labels.size()) fail("feature/label count mismatch");
    if (features.size() < 2) fail("need at least two training examples");
    for (const auto& row : features)
        if (row.size() != names.size())
            fail("feature vector length " + std::to_string(row.size()) + " does not match scheme (" +
                 std::to_string(names.size()) + ")");
    bool has_pos = false;
    bool has_neg = false;
    for (int y : labels) {
        if (y)
            has_pos = true;
        else
            has_neg = true;
    }
    if (!has_pos || !has_neg) fail("degenerate labels: training set contains a single class");
    if (!(opts.learning_rate > 0.0)) fail("learning rate must be > 0");
    if (opts.epochs == 0) fail("epochs must be >= 1");

    LinearModel model;
    model.scheme = scheme;
    model.names = names;
    standardize_stats(features, model.mean, model.stdev);

    std::size_t d = names.size();
    std::vector<std::vector<double>> xs(features.size(), std::vector<double>(d));
    for (std::size_t i = 0; i < features.size(); ++i)
        for (std::size_t j = 0; j < d; ++j)
            xs[i][j] = (features[i][j] - model.mean[j]) / model.stdev[j];

    model.weights.assign(d, 0.0);
    model.bias = 0.0;

    TrainResult result;
    result.loss_history.reserve(opts.epochs);
    std::vector<double> grad_w;
    double grad_b = 0.0;
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        bce_gradient(xs, labels, model.weights, model.bias, opts.l2, grad_w, grad_b);
        for (std::size_t j = 0; j < d; ++j) model.weights[j] -= opts.learning_rate * grad_w[j];
        model.bias -= opts.learning_rate * grad_b;
        result.loss_history.push_back(bce_loss(xs, labels, model.weights, model.bias, opts.l2));
    }
    result.final_loss = result.loss_history.back();
    result.model = std::move(model);
    return result;
}

double LinearModel::predict(std::span<const double> raw_features) const {
    if (raw_features.size() != weights.size())
        fail("feature vector length " + std::to_string(raw_features.size()) +
             " does not match model (" + std::to_string(weights.size()) + ")");
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j)
        z += weights[j] * ((raw_features[j] - mean[j]) / stdev[j]);
    return sigmoid(z);
}

ProbabilityMap oracle_selector(const LabelMap& labels) {
    ProbabilityMap probs;
    for (const auto& [qid, l] : labels) probs[qid] = l.label == Strategy::Alt ? 1.0 : 0.0;
    return probs;
}

ProbabilityMap random_selector(const std::vector<std::string>& qids, std::uint64_t seed) {
    ProbabilityMap probs;
    for (const auto& qid : qids) {
        SplitMix64 rng(mix64(fnv1a64(qid)) ^ mix64(seed));
        probs[qid] = rng.next_double();
    }
    return probs;
}

ProbabilityMap import_selector(const std::string& path) { return load_probabilities(path); }

void save_model(const std::string& path, const LinearModel& model, const std::vector<std::string>& header) {
    AtomicWriter w(path);
    w.write_header(header);
    w.stream() << "__scheme__\t" << to_string(model.scheme) << '\n';
    w.stream() << "__bias__\t" << format_fixed(model.bias, 12) << '\n';
    for (std::size_t j = 0; j < model.names.size(); ++j) {
        w.stream() << model.names[j] << '\t' << format_fixed(model.weights[j], 12) << '\t'
                   << format_fixed(model.mean[j], 12) << '\t' << format_fixed(model.stdev[j], 12) << '\n';
    }
    w.commit();
}

LinearModel load_model(const std::string& path) {
    LinearModel model;
    bool have_scheme = false;
    bool have_bias = false;
    std::vector<std::string> names;
    for_each_data_line(path, [&](std::size_t line_no, const std::string& line) {
        auto fields = split(line, '\t');
        if (fields[0] == "__scheme__") {
            if (fields.size() != 2) fail_at(path, line_no, "bad scheme row");
            model.scheme = scheme_from_string(fields[1]);
            have_scheme = true;
            return;
        }
        if (fields[0] == "__bias__") {
            if (fields.size() != 2 || !parse_double(fields[1], model.bias))
                fail_at(path, line_no, "bad bias row");
            have_bias = true;
            return;
        }
        if (fields.size() != 4) fail_at(path, line_no, "expected `name weight mean stdev`");
        double w = 0.0;
        double m = 0.0;
        double s = 0.0;
        if (!parse_double(fields[1], w) || !parse_double(fields[2], m) || !parse_double(fields[3], s))
            fail_at(path, line_no, "unparsable model row");
        if (!(s > 0.0)) fail_at(path, line_no, "stdev must be > 0");
        names.push_back(fields[0]);
        model.weights.push_back(w);
        model.mean.push_back(m);
        model.stdev.push_back(s);
    });
    if (!have_scheme || !have_bias) fail(path + ": missing __scheme__ or __bias__ row");
    model.names = std::move(names);
    auto expected = feature_names(model.scheme);
    if (model.names != expected) fail(path + ": feature rows do not match the scheme's feature set");
    return model;
}

}  // namespace retsel
