#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <retsel/corpus.hpp>
#include <retsel/dense_index.hpp>
#include <retsel/labeling.hpp>
#include <retsel/selector.hpp>
#include <retsel/sparse_index.hpp>
#include <retsel/synthetic.hpp>
#include <retsel/tradeoff.hpp>

namespace py = pybind11;
using namespace retsel;

PYBIND11_MODULE(_retsel, m) {
    m.doc() = "first-stage retrieval strategy selection harness";

    // corpus
    py::class_<TextRecord>(m, "TextRecord")
        .def(py::init<std::string, std::string>(), py::arg("id"), py::arg("text"))
        .def_readwrite("id", &TextRecord::id)
        .def_readwrite("text", &TextRecord::text)
        .def("__repr__", [](const TextRecord& r) { return "TextRecord(" + r.id + ")"; });

    py::class_<ScoredDoc>(m, "ScoredDoc")
        .def(py::init<std::string, double>(), py::arg("doc_id"), py::arg("score"))
        .def_readwrite("doc_id", &ScoredDoc::doc_id)
        .def_readwrite("score", &ScoredDoc::score)
        .def("__repr__",
             [](const ScoredDoc& d) { return "ScoredDoc(" + d.doc_id + ", " + std::to_string(d.score) + ")"; });

    py::class_<RankedList>(m, "RankedList")
        .def(py::init<>())
        .def_readwrite("query_id", &RankedList::query_id)
        .def_readwrite("entries", &RankedList::entries)
        .def_readwrite("cutoff", &RankedList::cutoff)
        .def("normalize", &RankedList::normalize)
        .def("__len__", [](const RankedList& r) { return r.entries.size(); });

    m.def("tokenize", [](const std::string& text) { return tokenize(text); }, py::arg("text"));
    m.def("unique_terms", &unique_terms, py::arg("tokens"));
    m.def("load_collection", &load_collection, py::arg("path"));
    m.def("save_collection", &save_collection, py::arg("path"), py::arg("records"),
          py::arg("header") = std::vector<std::string>{});
    m.def("load_qrels", &load_qrels, py::arg("path"), py::arg("min_grade") = 1);
    m.def("load_run", &load_run, py::arg("path"));
    m.def("save_run", &save_run, py::arg("path"), py::arg("runs"), py::arg("tag"),
          py::arg("header") = std::vector<std::string>{});
    m.def("load_probabilities", &load_probabilities, py::arg("path"));
    m.def("save_probabilities", &save_probabilities, py::arg("path"), py::arg("probs"),
          py::arg("header") = std::vector<std::string>{});

    // sparse index
    py::class_<Bm25Params>(m, "Bm25Params")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("k1"), py::arg("b"))
        .def_readwrite("k1", &Bm25Params::k1)
        .def_readwrite("b", &Bm25Params::b);

    py::class_<SearchStats>(m, "SearchStats")
        .def(py::init<>())
        .def_readwrite("candidates", &SearchStats::candidates)
        .def_readwrite("fully_scored", &SearchStats::fully_scored);

    py::class_<InvertedIndex>(m, "InvertedIndex")
        .def_static("build", &InvertedIndex::build, py::arg("collection"),
                    py::arg("params") = Bm25Params{})
        .def_static("load", &InvertedIndex::load, py::arg("path"))
        .def("save", &InvertedIndex::save, py::arg("path"))
        .def_property_readonly("doc_count", &InvertedIndex::doc_count)
        .def_property_readonly("avg_doc_length", &InvertedIndex::avg_doc_length)
        .def_property_readonly("vocab_size", &InvertedIndex::vocab_size)
        .def("df", &InvertedIndex::df, py::arg("term"))
        .def("idf", &InvertedIndex::idf, py::arg("term"))
        .def("doc_id", &InvertedIndex::doc_id, py::arg("ordinal"))
        .def("doc_length", &InvertedIndex::doc_length, py::arg("ordinal"))
        .def("score",
             [](const InvertedIndex& idx, const std::vector<std::string>& q, std::uint32_t ordinal) {
                 return idx.score(q, ordinal);
             },
             py::arg("query_tokens"), py::arg("ordinal"));

    m.def("search_exhaustive",
          [](const InvertedIndex& idx, const std::vector<std::string>& q, std::size_t k) {
              return search_exhaustive(idx, q, k);
          },
          py::arg("index"), py::arg("query_tokens"), py::arg("k"));
    m.def("search_wand",
          [](const InvertedIndex& idx, const std::vector<std::string>& q, std::size_t k) {
              return search_wand(idx, q, k);
          },
          py::arg("index"), py::arg("query_tokens"), py::arg("k"));
    m.def("search_wand_stats",
          [](const InvertedIndex& idx, const std::vector<std::string>& q, std::size_t k) {
              SearchStats stats;
              auto run = search_wand(idx, q, k, &stats);
              return py::make_tuple(run, stats);
          },
          py::arg("index"), py::arg("query_tokens"), py::arg("k"));

    // dense index
    py::class_<EmbeddingStore>(m, "EmbeddingStore")
        .def(py::init<std::size_t>(), py::arg("dim"))
        .def("add",
             [](EmbeddingStore& s, const std::string& id, const std::vector<double>& v) { s.add(id, v); },
             py::arg("id"), py::arg("vector"))
        .def_property_readonly("dim", &EmbeddingStore::dim)
        .def("__len__", &EmbeddingStore::size)
        .def("ids", &EmbeddingStore::ids)
        .def("vector_of",
             [](const EmbeddingStore& s, const std::string& id) {
                 auto v = s.vector_of(id);
                 return std::vector<double>(v.begin(), v.end());
             },
             py::arg("id"));

    m.def("embed_text",
          [](const std::string& text, std::size_t dim, std::uint64_t seed, const AliasTable& aliases) {
              return embed_text(text, dim, seed, aliases.empty() ? nullptr : &aliases);
          },
          py::arg("text"), py::arg("dim"), py::arg("seed"), py::arg("aliases") = AliasTable{});
    m.def("embed_synthetic",
          [](const std::vector<TextRecord>& records, std::size_t dim, std::uint64_t seed,
             const AliasTable& aliases) {
              return embed_synthetic(records, dim, seed, aliases.empty() ? nullptr : &aliases);
          },
          py::arg("records"), py::arg("dim"), py::arg("seed"), py::arg("aliases") = AliasTable{});
    m.def("load_embeddings", &load_embeddings, py::arg("path"));
    m.def("save_embeddings", &save_embeddings, py::arg("path"), py::arg("store"),
          py::arg("header") = std::vector<std::string>{});
    m.def("load_alias_table", &load_alias_table, py::arg("path"));
    m.def("search_dense",
          [](const EmbeddingStore& store, const std::vector<double>& query, std::size_t k) {
              return search_dense(store, query, k);
          },
          py::arg("store"), py::arg("query"), py::arg("k"));

    // labeling
    py::enum_<Scheme>(m, "Scheme").value("DENSE", Scheme::Dense).value("HYBRID", Scheme::Hybrid);
    py::enum_<Strategy>(m, "Strategy").value("SPARSE", Strategy::Sparse).value("ALT", Strategy::Alt);

    py::class_<StrategyLabel>(m, "StrategyLabel")
        .def_readonly("query_id", &StrategyLabel::query_id)
        .def_readonly("label", &StrategyLabel::label)
        .def_readonly("scheme", &StrategyLabel::scheme)
        .def_readonly("first_relevant", &StrategyLabel::first_relevant)
        .def_readonly("threshold", &StrategyLabel::threshold);

    py::class_<LabelReport>(m, "LabelReport")
        .def_readonly("labels", &LabelReport::labels)
        .def_readonly("skipped", &LabelReport::skipped);

    py::class_<HybridPool::Provenance>(m, "Provenance")
        .def_readonly("from_sparse", &HybridPool::Provenance::from_sparse)
        .def_readonly("from_dense", &HybridPool::Provenance::from_dense);

    py::class_<HybridPool>(m, "HybridPool")
        .def_readonly("query_id", &HybridPool::query_id)
        .def_readonly("docs", &HybridPool::docs)
        .def("doc_ids", &HybridPool::doc_ids);

    m.def("first_relevant_rank", &first_relevant_rank, py::arg("run"), py::arg("relevant"));
    m.def("label_query", &label_query, py::arg("query_id"), py::arg("rank"), py::arg("t"),
          py::arg("scheme"));
    m.def("label_all", &label_all, py::arg("runs"), py::arg("judgments"), py::arg("t"), py::arg("scheme"));
    m.def("merge_hybrid", &merge_hybrid, py::arg("sparse"), py::arg("dense"));
    m.def("save_labels", &save_labels, py::arg("path"), py::arg("labels"),
          py::arg("header") = std::vector<std::string>{});
    m.def("load_labels", &load_labels, py::arg("path"));

    // selector
    py::class_<LinearModel>(m, "LinearModel")
        .def_readonly("scheme", &LinearModel::scheme)
        .def_readonly("names", &LinearModel::names)
        .def_readonly("weights", &LinearModel::weights)
        .def_readonly("bias", &LinearModel::bias)
        .def_readonly("mean", &LinearModel::mean)
        .def_readonly("stdev", &LinearModel::stdev)
        .def("predict",
             [](const LinearModel& model, const std::vector<double>& x) { return model.predict(x); },
             py::arg("features"));

    py::class_<TrainOptions>(m, "TrainOptions")
        .def(py::init<>())
        .def_readwrite("learning_rate", &TrainOptions::learning_rate)
        .def_readwrite("epochs", &TrainOptions::epochs)
        .def_readwrite("l2", &TrainOptions::l2)
        .def_readwrite("seed", &TrainOptions::seed);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("model", &TrainResult::model)
        .def_readonly("loss_history", &TrainResult::loss_history)
        .def_readonly("final_loss", &TrainResult::final_loss);

    m.def("feature_names", &feature_names, py::arg("scheme"));
    m.def("featurize",
          [](const TextRecord& query, const InvertedIndex& index, const RankedList* run,
             const TextRecord* top_doc, Scheme scheme) {
              return featurize(query, index, run, top_doc, scheme);
          },
          py::arg("query"), py::arg("index"), py::arg("sparse_run") = nullptr,
          py::arg("top_doc") = nullptr, py::arg("scheme") = Scheme::Dense);
    m.def("train_selector", &train_selector, py::arg("features"), py::arg("labels"), py::arg("scheme"),
          py::arg("options") = TrainOptions{});
    m.def("oracle_selector", &oracle_selector, py::arg("labels"));
    m.def("random_selector", &random_selector, py::arg("qids"), py::arg("seed"));
    m.def("import_selector", &import_selector, py::arg("path"));
    m.def("save_model", &save_model, py::arg("path"), py::arg("model"),
          py::arg("header") = std::vector<std::string>{});
    m.def("load_model", &load_model, py::arg("path"));

    // tradeoff
    py::class_<PerQueryRecall>(m, "PerQueryRecall")
        .def(py::init<>())
        .def(py::init([](std::string qid, double sparse, double alt) {
                 return PerQueryRecall{std::move(qid), sparse, alt};
             }),
             py::arg("query_id"), py::arg("sparse"), py::arg("alt"))
        .def_readwrite("query_id", &PerQueryRecall::query_id)
        .def_readwrite("sparse", &PerQueryRecall::sparse)
        .def_readwrite("alt", &PerQueryRecall::alt);

    py::class_<LatencyModel>(m, "LatencyModel")
        .def(py::init<>())
        .def(py::init([](double sparse_ms, double dense_ms) {
                 return LatencyModel{sparse_ms, dense_ms};
             }),
             py::arg("sparse_ms"), py::arg("dense_ms"))
        .def_readwrite("sparse_ms", &LatencyModel::sparse_ms)
        .def_readwrite("dense_ms", &LatencyModel::dense_ms);

    py::class_<CurvePoint>(m, "CurvePoint")
        .def_readonly("f", &CurvePoint::f)
        .def_readonly("n_alt", &CurvePoint::n_alt)
        .def_readonly("mean_recall", &CurvePoint::mean_recall)
        .def_readonly("mean_latency_ms", &CurvePoint::mean_latency_ms);

    py::class_<TradeoffCurve>(m, "TradeoffCurve")
        .def_readonly("scheme", &TradeoffCurve::scheme)
        .def_readonly("selector", &TradeoffCurve::selector)
        .def_readonly("points", &TradeoffCurve::points);

    py::class_<MonteCarloEstimate>(m, "MonteCarloEstimate")
        .def_readonly("mean", &MonteCarloEstimate::mean)
        .def_readonly("std_error", &MonteCarloEstimate::std_error)
        .def_readonly("trials", &MonteCarloEstimate::trials);

    py::class_<ParetoPoint>(m, "ParetoPoint")
        .def(py::init<>())
        .def(py::init([](double latency_ms, double recall, Scheme scheme, std::string selector, double f) {
                 return ParetoPoint{latency_ms, recall, scheme, std::move(selector), f};
             }),
             py::arg("latency_ms"), py::arg("recall"), py::arg("scheme") = Scheme::Dense,
             py::arg("selector") = std::string{}, py::arg("f") = 0.0)
        .def_readwrite("latency_ms", &ParetoPoint::latency_ms)
        .def_readwrite("recall", &ParetoPoint::recall)
        .def_readwrite("scheme", &ParetoPoint::scheme)
        .def_readwrite("selector", &ParetoPoint::selector)
        .def_readwrite("f", &ParetoPoint::f);

    m.def("recall_at_k", &recall_at_k, py::arg("run"), py::arg("relevant"), py::arg("k"));
    m.def("recall_of_pool", &recall_of_pool, py::arg("pool"), py::arg("relevant"));
    m.def("budget_sweep",
          [](const ProbabilityMap& probs, const std::vector<PerQueryRecall>& recalls,
             const LatencyModel& latency, Scheme scheme, const std::vector<double>& grid,
             const std::string& name) {
              return budget_sweep(probs, recalls, latency, scheme, grid, name);
          },
          py::arg("probs"), py::arg("recalls"), py::arg("latency"), py::arg("scheme"), py::arg("grid"),
          py::arg("selector_name"));
    m.def("random_baseline",
          [](const std::vector<PerQueryRecall>& recalls, const LatencyModel& latency, Scheme scheme,
             const std::vector<double>& grid) {
              return random_baseline(recalls, latency, scheme, grid);
          },
          py::arg("recalls"), py::arg("latency"), py::arg("scheme"), py::arg("grid"));
    m.def("monte_carlo_baseline", &monte_carlo_baseline, py::arg("recalls"), py::arg("scheme"),
          py::arg("f"), py::arg("trials"), py::arg("seed"));
    m.def("pareto_frontier", &pareto_frontier, py::arg("points"));
    m.def("save_curves_csv", &save_curves_csv, py::arg("path"), py::arg("curves"),
          py::arg("header") = std::vector<std::string>{});
    m.def("load_curve_csv", &load_curve_csv, py::arg("path"));
    m.def("save_pareto_csv", &save_pareto_csv, py::arg("path"), py::arg("points"),
          py::arg("header") = std::vector<std::string>{});

    // synthetic data
    py::class_<SyntheticSpec>(m, "SyntheticSpec")
        .def(py::init<>())
        .def_readwrite("n_docs", &SyntheticSpec::n_docs)
        .def_readwrite("n_exact", &SyntheticSpec::n_exact)
        .def_readwrite("n_mismatch", &SyntheticSpec::n_mismatch)
        .def_readwrite("n_unanswerable", &SyntheticSpec::n_unanswerable)
        .def_readwrite("vocab", &SyntheticSpec::vocab)
        .def_readwrite("doc_len_min", &SyntheticSpec::doc_len_min)
        .def_readwrite("doc_len_max", &SyntheticSpec::doc_len_max)
        .def_readwrite("seed", &SyntheticSpec::seed);

    py::class_<SyntheticData>(m, "SyntheticData")
        .def_readonly("collection", &SyntheticData::collection)
        .def_readonly("queries", &SyntheticData::queries)
        .def_readonly("qrels", &SyntheticData::qrels)
        .def_readonly("aliases", &SyntheticData::aliases);

    m.def("generate_synthetic", &generate_synthetic, py::arg("spec") = SyntheticSpec{});
}
