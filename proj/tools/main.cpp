#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include <retsel/common.hpp>
#include <retsel/corpus.hpp>
#include <retsel/dense_index.hpp>
#include <retsel/labeling.hpp>
#include <retsel/selector.hpp>
#include <retsel/sparse_index.hpp>
#include <retsel/synthetic.hpp>
#include <retsel/tradeoff.hpp>

namespace {

using namespace retsel;

// Flat `key=value` config files. Keys are the long option names without
// dashes; values given on the command line win. Applied by rewriting argv
// before CLI11 sees it.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);

    std::string config_path;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) fail("--config needs a file argument");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            out.push_back(args[i]);
        }
    }
    if (config_path.empty()) return out;

    std::set<std::string> given;
    for (const auto& a : out) {
        if (a.rfind("--", 0) == 0) given.insert(split(a.substr(2), '=')[0]);
        if (a.rfind("-", 0) == 0 && a.size() == 2) given.insert(a.substr(1));
    }
    static const std::map<std::string, std::string> kShortAlias = {{"out", "o"}, {"threshold", "t"}};
    auto already_given = [&](const std::string& key) {
        if (given.count(key)) return true;
        auto it = kShortAlias.find(key);
        return it != kShortAlias.end() && given.count(it->second) > 0;
    };

    for_each_data_line(config_path, [&](std::size_t line_no, const std::string& line) {
        auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0) fail_at(config_path, line_no, "expected `key=value`");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (already_given(key)) return;
        if (value == "true" || value == "false") {
            if (value == "true") out.push_back("--" + key);
            return;
        }
        out.push_back("--" + key + "=" + value);
    });
    return out;
}

// Every output file carries the resolved configuration as comment lines so a
// result can always be traced back to the exact invocation. No timestamps:
// outputs must be byte-identical across reruns.
struct Provenance {
    std::vector<std::string> lines;

    explicit Provenance(const std::string& command) { lines.push_back("command=" + command); }

    template <typename T>
    void add(const std::string& key, const T& value) {
        if constexpr (std::is_same_v<T, std::string>) {
            lines.push_back(key + "=" + value);
        } else if constexpr (std::is_same_v<T, bool>) {
            lines.push_back(key + "=" + (value ? "1" : "0"));
        } else if constexpr (std::is_floating_point_v<T>) {
            lines.push_back(key + "=" + format_fixed(value));
        } else {
            lines.push_back(key + "=" + std::to_string(value));
        }
    }
};

std::vector<double> parse_grid(const std::string& grid_csv, std::size_t grid_steps) {
    std::vector<double> grid;
    if (!grid_csv.empty()) {
        for (const auto& tok : split(grid_csv, ',')) {
            double f = 0.0;
            if (!parse_double(tok, f)) fail("unparsable grid value '" + tok + "'");
            grid.push_back(f);
        }
    } else {
        if (grid_steps == 0) fail("grid-steps must be >= 1");
        for (std::size_t i = 0; i <= grid_steps; ++i)
            grid.push_back(static_cast<double>(i) / static_cast<double>(grid_steps));
    }
    double prev = -1.0;
    for (double f : grid) {
        if (!(f >= 0.0 && f <= 1.0)) fail("grid value outside [0,1]");
        if (f < prev) fail("grid must be ascending");
        prev = f;
    }
    return grid;
}

std::map<std::string, std::string> text_by_id(const std::vector<TextRecord>& records) {
    std::map<std::string, std::string> out;
    for (const auto& r : records) out[r.id] = r.text;
    return out;
}

// ----------------------------------------------------------------- index ---

struct IndexArgs {
    std::string collection;
    std::string out;
    double k1 = 0.9;
    double b = 0.4;
};

int run_index(const IndexArgs& a) {
    auto collection = load_collection(a.collection);
    auto index = InvertedIndex::build(collection, Bm25Params{a.k1, a.b});
    index.save(a.out);
    std::cerr << "index: " << index.doc_count() << " docs, " << index.vocab_size()
              << " terms, avgdl " << format_fixed(index.avg_doc_length(), 2) << " -> " << a.out << "\n";
    return 0;
}

// -------------------------------------------------------------- retrieve ---

struct RetrieveArgs {
    std::string mode;
    std::string queries;
    std::string index;
    std::string collection;
    std::string embeddings;
    std::string query_embeddings;
    std::string alias_table;
    std::string out;
    std::string sparse_out;
    std::string dense_out;
    std::string algo = "wand";
    std::string tag;
    std::size_t k = 1000;
    std::size_t embed_dim = 64;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

RunMap sparse_retrieve(const RetrieveArgs& a, const std::vector<TextRecord>& queries) {
    if (a.index.empty()) fail("sparse retrieval requires --index");
    auto index = InvertedIndex::load(a.index);
    RunMap runs;
    for (const auto& q : queries) {
        auto tokens = tokenize(q.text);
        RankedList rl = a.algo == "exhaustive" ? search_exhaustive(index, tokens, a.k)
                                               : search_wand(index, tokens, a.k);
        rl.query_id = q.id;
        runs[q.id] = std::move(rl);
    }
    return runs;
}

RunMap dense_retrieve(const RetrieveArgs& a, const std::vector<TextRecord>& queries) {
    AliasTable aliases;
    if (!a.alias_table.empty()) aliases = load_alias_table(a.alias_table);

    RunMap runs;
    if (!a.embeddings.empty()) {
        auto store = load_embeddings(a.embeddings);
        if (a.query_embeddings.empty())
            fail("dense retrieval from --embeddings requires --query-embeddings");
        auto qstore = load_embeddings(a.query_embeddings);
        for (const auto& q : queries) {
            auto vec = qstore.vector_of(q.id);
            RankedList rl = search_dense(store, vec, a.k);
            rl.query_id = q.id;
            runs[q.id] = std::move(rl);
        }
    } else {
        if (a.collection.empty())
            fail("dense retrieval requires --embeddings or --collection (for synthetic embeddings)");
        if (!a.seed_set) fail("synthetic embeddings require --seed");
        auto collection = load_collection(a.collection);
        auto store = embed_synthetic(collection, a.embed_dim, a.seed, &aliases);
        for (const auto& q : queries) {
            auto vec = embed_text(q.text, a.embed_dim, a.seed, &aliases);
            RankedList rl = search_dense(store, vec, a.k);
            rl.query_id = q.id;
            runs[q.id] = std::move(rl);
        }
    }
    return runs;
}

int run_retrieve(const RetrieveArgs& a) {
    auto queries = load_collection(a.queries);
    Provenance prov("retrieve");
    prov.add("mode", a.mode);
    prov.add("queries", a.queries);
    prov.add("k", a.k);
    if (a.mode != "dense") {
        prov.add("index", a.index);
        prov.add("algo", a.algo);
    }
    if (a.mode != "sparse") {
        if (!a.embeddings.empty()) {
            prov.add("embeddings", a.embeddings);
            prov.add("query_embeddings", a.query_embeddings);
        } else {
            prov.add("collection", a.collection);
            prov.add("embed_dim", a.embed_dim);
            prov.add("seed", a.seed);
        }
        if (!a.alias_table.empty()) prov.add("alias_table", a.alias_table);
    }

    std::string tag = a.tag;
    std::vector<std::string> written;
    auto cleanup_and_rethrow = [&](const std::exception& e) -> int {
        for (const auto& p : written) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
        throw std::runtime_error(e.what());
    };

    try {
        if (a.mode == "sparse") {
            std::string out = a.out.empty() ? a.sparse_out : a.out;
            if (out.empty()) fail("sparse retrieval requires --out");
            auto runs = sparse_retrieve(a, queries);
            save_run(out, runs, tag.empty() ? "sparse" : tag, prov.lines);
            written.push_back(out);
            std::cerr << "retrieve: sparse top-" << a.k << " for " << queries.size() << " queries -> "
                      << out << "\n";
        } else if (a.mode == "dense") {
            std::string out = a.out.empty() ? a.dense_out : a.out;
            if (out.empty()) fail("dense retrieval requires --out");
            auto runs = dense_retrieve(a, queries);
            save_run(out, runs, tag.empty() ? "dense" : tag, prov.lines);
            written.push_back(out);
            std::cerr << "retrieve: dense top-" << a.k << " for " << queries.size() << " queries -> "
                      << out << "\n";
        } else if (a.mode == "hybrid") {
            if (a.sparse_out.empty() || a.dense_out.empty())
                fail("hybrid retrieval requires --sparse-out and --dense-out");
            auto sparse = sparse_retrieve(a, queries);
            auto dense = dense_retrieve(a, queries);
            save_run(a.sparse_out, sparse, tag.empty() ? "sparse" : tag + "-sparse", prov.lines);
            written.push_back(a.sparse_out);
            save_run(a.dense_out, dense, tag.empty() ? "dense" : tag + "-dense", prov.lines);
            written.push_back(a.dense_out);
            std::cerr << "retrieve: hybrid top-" << a.k << " for " << queries.size() << " queries -> "
                      << a.sparse_out << " + " << a.dense_out << "\n";
        } else {
            fail("unknown mode '" + a.mode + "'");
        }
    } catch (const std::exception& e) {
        return cleanup_and_rethrow(e);
    }
    return 0;
}

// ----------------------------------------------------------------- label ---

struct LabelArgs {
    std::string run;
    std::string qrels;
    std::string queries;
    std::string out;
    std::size_t threshold = 50;
    int min_grade = 1;
    std::string scheme = "dense";
};

int run_label(const LabelArgs& a) {
    auto runs = load_run(a.run);
    auto qrels = load_qrels(a.qrels, a.min_grade);
    if (!a.queries.empty()) {
        // queries the retriever returned nothing for still get labeled (ALT)
        for (const auto& q : load_collection(a.queries)) {
            if (!runs.count(q.id)) {
                RankedList empty;
                empty.query_id = q.id;
                runs[q.id] = std::move(empty);
            }
        }
    }
    auto report = label_all(runs, qrels, a.threshold, scheme_from_string(a.scheme));

    Provenance prov("label");
    prov.add("run", a.run);
    prov.add("qrels", a.qrels);
    if (!a.queries.empty()) prov.add("queries", a.queries);
    prov.add("threshold", a.threshold);
    prov.add("min_grade", a.min_grade);
    prov.add("scheme", a.scheme);
    save_labels(a.out, report.labels, prov.lines);

    std::size_t n_sparse = 0;
    for (const auto& [qid, l] : report.labels)
        if (l.label == Strategy::Sparse) ++n_sparse;
    std::cerr << "label: " << report.labels.size() << " labeled (" << n_sparse << " SPARSE, "
              << report.labels.size() - n_sparse << " ALT), " << report.skipped.size()
              << " skipped without judgments -> " << a.out << "\n";
    return 0;
}

// -------------------------------------------------------- train-selector ---

struct TrainArgs {
    std::string scheme = "dense";
    std::string labels;
    std::string queries;
    std::string index;
    std::string run;
    std::string collection;
    std::string out;
    std::string probs_out;
    std::string probs_split = "all";
    double lr = 0.5;
    std::size_t epochs = 500;
    double l2 = 0.001;
    double train_frac = 1.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int run_train(const TrainArgs& a) {
    Scheme scheme = scheme_from_string(a.scheme);
    auto labels = load_labels(a.labels);
    auto queries = text_by_id(load_collection(a.queries));
    auto index = InvertedIndex::load(a.index);

    RunMap runs;
    std::map<std::string, std::string> docs;
    if (scheme == Scheme::Hybrid) {
        if (a.run.empty() || a.collection.empty())
            fail("hybrid training requires --run and --collection");
        runs = load_run(a.run);
        docs = text_by_id(load_collection(a.collection));
    }

    std::vector<std::string> qids;
    std::vector<std::vector<double>> features;
    for (const auto& [qid, label] : labels) {
        auto qt = queries.find(qid);
        if (qt == queries.end()) fail("labeled query '" + qid + "' missing from " + a.queries);
        TextRecord query{qid, qt->second};
        if (scheme == Scheme::Dense) {
            features.push_back(featurize(query, index, nullptr, nullptr, scheme));
        } else {
            RankedList empty;
            empty.query_id = qid;
            const RankedList* run = &empty;
            auto rt = runs.find(qid);
            if (rt != runs.end()) run = &rt->second;
            std::optional<TextRecord> top;
            if (!run->entries.empty()) {
                const auto& top_id = run->entries[0].doc_id;
                auto dt = docs.find(top_id);
                if (dt == docs.end()) fail("top document '" + top_id + "' missing from " + a.collection);
                top = TextRecord{top_id, dt->second};
            }
            features.push_back(featurize(query, index, run, top ? &*top : nullptr, scheme));
        }
        qids.push_back(qid);
    }
    if (qids.empty()) fail("no labeled queries to train on");

    // train/dev split by seeded shuffle of the (sorted) query ids
    std::vector<std::size_t> order(qids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (a.train_frac < 1.0) {
        if (!a.seed_set) fail("--train-frac < 1 requires --seed");
        SplitMix64 rng(mix64(a.seed));
        for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[rng.next_below(i + 1)]);
    }
    if (!(a.train_frac > 0.0 && a.train_frac <= 1.0)) fail("--train-frac must be in (0,1]");
    auto n_train = static_cast<std::size_t>(
        std::ceil(a.train_frac * static_cast<double>(order.size()) - 1e-9));
    if (n_train < 2) fail("train split has fewer than two examples");

    std::vector<std::vector<double>> train_x;
    std::vector<int> train_y;
    std::set<std::string> train_qids;
    for (std::size_t i = 0; i < n_train; ++i) {
        std::size_t idx = order[i];
        train_x.push_back(features[idx]);
        train_y.push_back(labels.at(qids[idx]).label == Strategy::Alt ? 1 : 0);
        train_qids.insert(qids[idx]);
    }

    TrainOptions opts;
    opts.learning_rate = a.lr;
    opts.epochs = a.epochs;
    opts.l2 = a.l2;
    opts.seed = a.seed;
    auto result = train_selector(train_x, train_y, scheme, opts);

    Provenance prov("train-selector");
    prov.add("scheme", a.scheme);
    prov.add("labels", a.labels);
    prov.add("queries", a.queries);
    prov.add("index", a.index);
    if (scheme == Scheme::Hybrid) {
        prov.add("run", a.run);
        prov.add("collection", a.collection);
    }
    prov.add("lr", a.lr);
    prov.add("epochs", a.epochs);
    prov.add("l2", a.l2);
    prov.add("train_frac", a.train_frac);
    if (a.seed_set) prov.add("seed", a.seed);
    save_model(a.out, result.model, prov.lines);

    if (!a.probs_out.empty()) {
        ProbabilityMap probs;
        for (std::size_t i = 0; i < qids.size(); ++i) {
            bool in_train = train_qids.count(qids[i]) > 0;
            if (a.probs_split == "train" && !in_train) continue;
            if (a.probs_split == "dev" && in_train) continue;
            probs[qids[i]] = result.model.predict(features[i]);
        }
        Provenance pp = prov;
        pp.add("probs_split", a.probs_split);
        save_probabilities(a.probs_out, probs, pp.lines);
    }

    std::cerr << "train-selector: " << n_train << " train / " << qids.size() - n_train
              << " held out, final loss " << format_fixed(result.final_loss) << " -> " << a.out << "\n";
    return 0;
}

// ----------------------------------------------------------------- sweep ---

struct SweepArgs {
    std::string scheme = "dense";
    std::string sparse_run;
    std::string alt_run;
    std::string qrels;
    std::string selector = "import";
    std::string probs;
    std::string oracle_labels;
    std::string model;
    std::string queries;
    std::string index;
    std::string collection;
    std::string selector_name;
    std::string grid_csv;
    std::string out;
    std::size_t grid_steps = 20;
    std::size_t k = 1000;
    std::size_t pool_cutoff = 0;  // 0: untruncated union
    int min_grade = 1;
    double latency_sparse = 55.0;
    double latency_dense = 103.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool restrict_to_probs = false;
};

int run_sweep(const SweepArgs& a) {
    Scheme scheme = scheme_from_string(a.scheme);
    auto grid = parse_grid(a.grid_csv, a.grid_steps);
    auto sparse_runs = load_run(a.sparse_run);
    auto alt_runs = load_run(a.alt_run);
    auto qrels = load_qrels(a.qrels, a.min_grade);

    // the probability source (external file, oracle labels, seeded random, or
    // a trained model applied to query features)
    ProbabilityMap probs;
    std::string selector_name = a.selector_name.empty() ? a.selector : a.selector_name;
    if (a.selector == "import") {
        if (a.probs.empty()) fail("--selector import requires --probs");
        probs = import_selector(a.probs);
    } else if (a.selector == "oracle") {
        if (a.oracle_labels.empty()) fail("--selector oracle requires --labels");
        probs = oracle_selector(load_labels(a.oracle_labels));
    } else if (a.selector == "random") {
        if (!a.seed_set) fail("--selector random requires --seed");
        // generated once the evaluated set is known
    } else if (a.selector == "model") {
        if (a.model.empty() || a.queries.empty() || a.index.empty())
            fail("--selector model requires --model, --queries and --index");
        // computed once the evaluated set is known
    } else {
        fail("unknown selector '" + a.selector + "'");
    }

    // universe: every query either retriever or the selector knows about
    std::set<std::string> universe;
    for (const auto& [qid, rl] : sparse_runs) universe.insert(qid);
    for (const auto& [qid, rl] : alt_runs) universe.insert(qid);
    for (const auto& [qid, p] : probs) universe.insert(qid);

    std::size_t skipped = 0;
    std::vector<std::string> evaluated;
    for (const auto& qid : universe) {
        if (qrels.count(qid))
            evaluated.push_back(qid);
        else
            ++skipped;
    }
    if (evaluated.empty()) fail("no judged queries to evaluate");

    if (a.restrict_to_probs) {
        std::vector<std::string> kept;
        for (const auto& qid : evaluated)
            if (probs.count(qid)) kept.push_back(qid);
        evaluated = std::move(kept);
        if (evaluated.empty()) fail("no judged queries covered by the probability file");
    }

    static const RankedList kEmptyRun;
    auto run_for = [](const RunMap& runs, const std::string& qid) -> const RankedList& {
        auto it = runs.find(qid);
        return it == runs.end() ? kEmptyRun : it->second;
    };

    std::vector<PerQueryRecall> recalls;
    for (const auto& qid : evaluated) {
        const auto& relevant = qrels.at(qid);
        const RankedList& sparse = run_for(sparse_runs, qid);
        const RankedList& alt = run_for(alt_runs, qid);
        PerQueryRecall r;
        r.query_id = qid;
        r.sparse = recall_at_k(sparse, relevant, a.k);
        if (scheme == Scheme::Dense) {
            r.alt = recall_at_k(alt, relevant, a.k);
        } else {
            auto truncated = [&](const RankedList& rl) {
                RankedList copy = rl;
                if (a.pool_cutoff > 0 && copy.entries.size() > a.pool_cutoff)
                    copy.entries.resize(a.pool_cutoff);
                return copy;
            };
            auto st = truncated(sparse);
            auto at = truncated(alt);
            at.query_id = st.query_id = qid;
            r.alt = recall_of_pool(merge_hybrid(st, at).doc_ids(), relevant);
        }
        recalls.push_back(std::move(r));
    }

    if (a.selector == "random") {
        probs = random_selector(evaluated, a.seed);
    } else if (a.selector == "model") {
        auto model = load_model(a.model);
        if (model.scheme != scheme) fail("model scheme does not match --scheme");
        auto queries = text_by_id(load_collection(a.queries));
        auto index = InvertedIndex::load(a.index);
        std::map<std::string, std::string> docs;
        if (scheme == Scheme::Hybrid) {
            if (a.collection.empty()) fail("--selector model with the hybrid scheme requires --collection");
            docs = text_by_id(load_collection(a.collection));
        }
        for (const auto& qid : evaluated) {
            auto qt = queries.find(qid);
            if (qt == queries.end()) fail("query '" + qid + "' missing from " + a.queries);
            TextRecord query{qid, qt->second};
            std::vector<double> f;
            if (scheme == Scheme::Dense) {
                f = featurize(query, index, nullptr, nullptr, scheme);
            } else {
                const RankedList& run = run_for(sparse_runs, qid);
                std::optional<TextRecord> top;
                if (!run.entries.empty()) {
                    auto dt = docs.find(run.entries[0].doc_id);
                    if (dt == docs.end())
                        fail("top document '" + run.entries[0].doc_id + "' missing from " + a.collection);
                    top = TextRecord{dt->first, dt->second};
                }
                f = featurize(query, index, &run, top ? &*top : nullptr, scheme);
            }
            probs[qid] = model.predict(f);
        }
    } else {
        // drop selector entries for unjudged queries (already counted as
        // skipped via the universe); missing entries for judged queries stay
        // fatal inside budget_sweep
        ProbabilityMap kept;
        for (const auto& qid : evaluated) {
            auto it = probs.find(qid);
            if (it != probs.end()) kept.emplace(qid, it->second);
        }
        probs = std::move(kept);
    }

    LatencyModel latency{a.latency_sparse, a.latency_dense};
    auto curve = budget_sweep(probs, recalls, latency, scheme, grid, selector_name);
    auto baseline = random_baseline(recalls, latency, scheme, grid);

    Provenance prov("sweep");
    prov.add("scheme", a.scheme);
    prov.add("sparse_run", a.sparse_run);
    prov.add("alt_run", a.alt_run);
    prov.add("qrels", a.qrels);
    prov.add("min_grade", a.min_grade);
    prov.add("k", a.k);
    if (scheme == Scheme::Hybrid) prov.add("pool_cutoff", a.pool_cutoff);
    prov.add("selector", a.selector);
    prov.add("selector_name", selector_name);
    if (!a.probs.empty()) prov.add("probs", a.probs);
    if (!a.oracle_labels.empty()) prov.add("labels", a.oracle_labels);
    if (!a.model.empty()) prov.add("model", a.model);
    if (a.seed_set) prov.add("seed", a.seed);
    prov.add("latency_sparse", a.latency_sparse);
    prov.add("latency_dense", a.latency_dense);
    prov.add("restrict_to_probs", a.restrict_to_probs);
    {
        std::string g;
        for (double f : grid) {
            if (!g.empty()) g += ",";
            g += format_fixed(f);
        }
        prov.add("grid", g);
    }
    save_curves_csv(a.out, {curve, baseline}, prov.lines);

    std::cerr << "sweep: " << evaluated.size() << " queries (" << skipped
              << " skipped without judgments), recall " << format_fixed(curve.points.front().mean_recall)
              << " at f=0 to " << format_fixed(curve.points.back().mean_recall) << " at f=1 -> " << a.out
              << "\n";
    return 0;
}

// ---------------------------------------------------------------- pareto ---

struct ParetoArgs {
    std::vector<std::string> curves;
    std::string out;
};

int run_pareto(const ParetoArgs& a) {
    std::vector<ParetoPoint> points;
    for (const auto& path : a.curves) {
        auto pts = load_curve_csv(path);
        points.insert(points.end(), pts.begin(), pts.end());
    }
    auto frontier = pareto_frontier(points);

    Provenance prov("pareto");
    for (const auto& path : a.curves) prov.add("curve", path);
    save_pareto_csv(a.out, frontier, prov.lines);
    std::cerr << "pareto: " << frontier.size() << " of " << points.size()
              << " operating points on the frontier -> " << a.out << "\n";
    return 0;
}

// ----------------------------------------------------------- gen-synthetic ---

struct GenArgs {
    std::string out_dir;
    std::size_t docs = 12000;
    std::size_t exact = 70;
    std::size_t mismatch = 70;
    std::size_t unanswerable = 60;
    std::size_t vocab = 2000;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int run_gen(const GenArgs& a) {
    if (!a.seed_set) fail("gen-synthetic requires --seed");
    SyntheticSpec spec;
    spec.n_docs = a.docs;
    spec.n_exact = a.exact;
    spec.n_mismatch = a.mismatch;
    spec.n_unanswerable = a.unanswerable;
    spec.vocab = a.vocab;
    spec.seed = a.seed;
    auto data = generate_synthetic(spec);

    std::filesystem::create_directories(a.out_dir);
    auto in_dir = [&](const std::string& name) { return (std::filesystem::path(a.out_dir) / name).string(); };

    Provenance prov("gen-synthetic");
    prov.add("docs", a.docs);
    prov.add("exact", a.exact);
    prov.add("mismatch", a.mismatch);
    prov.add("unanswerable", a.unanswerable);
    prov.add("vocab", a.vocab);
    prov.add("seed", a.seed);

    save_collection(in_dir("collection.tsv"), data.collection, prov.lines);
    save_collection(in_dir("queries.tsv"), data.queries, prov.lines);
    save_qrels(in_dir("qrels.txt"), data.qrels, prov.lines);
    {
        AtomicWriter w(in_dir("alias.tsv"));
        w.write_header(prov.lines);
        for (const auto& [token, canonical] : data.aliases)
            w.stream() << token << '\t' << canonical << '\n';
        w.commit();
    }

    std::cerr << "gen-synthetic: " << data.collection.size() << " docs, " << data.queries.size()
              << " queries (" << a.exact << " exact / " << a.mismatch << " mismatch / " << a.unanswerable
              << " unanswerable) -> " << a.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-stage retrieval strategy selection harness"};
    app.require_subcommand(1);
    app.footer("Each subcommand also accepts --config FILE with flat key=value lines\n"
               "(long option names without dashes); command-line flags take precedence.");

    IndexArgs index_args;
    auto* cmd_index = app.add_subcommand("index", "build a BM25 inverted index");
    cmd_index->add_option("--collection", index_args.collection, "collection.tsv")->required();
    cmd_index->add_option("--k1", index_args.k1, "BM25 k1");
    cmd_index->add_option("--b", index_args.b, "BM25 b");
    cmd_index->add_option("-o,--out", index_args.out, "output index file")->required();

    RetrieveArgs ret_args;
    auto* cmd_retrieve = app.add_subcommand("retrieve", "run sparse/dense/hybrid retrieval");
    cmd_retrieve->add_option("--mode", ret_args.mode, "sparse|dense|hybrid")->required();
    cmd_retrieve->add_option("--queries", ret_args.queries, "queries.tsv")->required();
    cmd_retrieve->add_option("--index", ret_args.index, "index file (sparse/hybrid)");
    cmd_retrieve->add_option("--collection", ret_args.collection, "collection.tsv (synthetic embeddings)");
    cmd_retrieve->add_option("--embeddings", ret_args.embeddings, "document embeddings.tsv");
    cmd_retrieve->add_option("--query-embeddings", ret_args.query_embeddings, "query embeddings.tsv");
    cmd_retrieve->add_option("--alias-table", ret_args.alias_table, "token alias table.tsv");
    cmd_retrieve->add_option("--algo", ret_args.algo, "wand|exhaustive")
        ->check(CLI::IsMember({"wand", "exhaustive"}));
    cmd_retrieve->add_option("--k", ret_args.k, "result list depth");
    cmd_retrieve->add_option("--embed-dim", ret_args.embed_dim, "synthetic embedding dimension");
    auto* ret_seed = cmd_retrieve->add_option("--seed", ret_args.seed, "synthetic embedding seed");
    cmd_retrieve->add_option("--tag", ret_args.tag, "run tag");
    cmd_retrieve->add_option("-o,--out", ret_args.out, "output run file (sparse/dense mode)");
    cmd_retrieve->add_option("--sparse-out", ret_args.sparse_out, "sparse run output (hybrid mode)");
    cmd_retrieve->add_option("--dense-out", ret_args.dense_out, "dense run output (hybrid mode)");

    LabelArgs label_args;
    auto* cmd_label = app.add_subcommand("label", "label queries sparse vs alt from a sparse run");
    cmd_label->add_option("--run", label_args.run, "sparse run file")->required();
    cmd_label->add_option("--qrels", label_args.qrels, "qrels file")->required();
    cmd_label->add_option("--queries", label_args.queries, "queries.tsv (to label no-result queries)");
    cmd_label->add_option("-t,--threshold", label_args.threshold, "rank threshold T");
    cmd_label->add_option("--min-grade", label_args.min_grade, "minimum relevant grade");
    cmd_label->add_option("--scheme", label_args.scheme, "dense|hybrid")
        ->check(CLI::IsMember({"dense", "hybrid"}));
    cmd_label->add_option("-o,--out", label_args.out, "labels.tsv output")->required();

    TrainArgs train_args;
    auto* cmd_train = app.add_subcommand("train-selector", "train the native linear selector");
    cmd_train->add_option("--scheme", train_args.scheme, "dense|hybrid")
        ->check(CLI::IsMember({"dense", "hybrid"}));
    cmd_train->add_option("--labels", train_args.labels, "labels.tsv")->required();
    cmd_train->add_option("--queries", train_args.queries, "queries.tsv")->required();
    cmd_train->add_option("--index", train_args.index, "index file")->required();
    cmd_train->add_option("--run", train_args.run, "sparse run (hybrid features)");
    cmd_train->add_option("--collection", train_args.collection, "collection.tsv (hybrid features)");
    cmd_train->add_option("--lr", train_args.lr, "learning rate");
    cmd_train->add_option("--epochs", train_args.epochs, "training epochs");
    cmd_train->add_option("--l2", train_args.l2, "L2 regularization weight");
    cmd_train->add_option("--train-frac", train_args.train_frac, "fraction of queries used for training");
    auto* train_seed = cmd_train->add_option("--seed", train_args.seed, "split shuffle seed");
    cmd_train->add_option("-o,--out", train_args.out, "model.tsv output")->required();
    cmd_train->add_option("--probs-out", train_args.probs_out, "write predicted probabilities");
    cmd_train->add_option("--probs-split", train_args.probs_split, "all|train|dev")
        ->check(CLI::IsMember({"all", "train", "dev"}));

    SweepArgs sweep_args;
    auto* cmd_sweep = app.add_subcommand("sweep", "budget sweep: selector curve and random baseline");
    cmd_sweep->add_option("--scheme", sweep_args.scheme, "dense|hybrid")
        ->check(CLI::IsMember({"dense", "hybrid"}));
    cmd_sweep->add_option("--sparse-run", sweep_args.sparse_run, "sparse run file")->required();
    cmd_sweep->add_option("--alt-run", sweep_args.alt_run, "dense run file")->required();
    cmd_sweep->add_option("--qrels", sweep_args.qrels, "qrels file")->required();
    cmd_sweep->add_option("--min-grade", sweep_args.min_grade, "minimum relevant grade");
    cmd_sweep->add_option("--k", sweep_args.k, "recall cutoff K");
    cmd_sweep->add_option("--pool-cutoff", sweep_args.pool_cutoff,
                          "truncate each run before pooling (hybrid; 0 = none)");
    cmd_sweep->add_option("--selector", sweep_args.selector, "import|oracle|random|model")
        ->check(CLI::IsMember({"import", "oracle", "random", "model"}));
    cmd_sweep->add_option("--probs", sweep_args.probs, "probability file (selector=import)");
    cmd_sweep->add_option("--labels", sweep_args.oracle_labels, "labels.tsv (selector=oracle)");
    cmd_sweep->add_option("--model", sweep_args.model, "model.tsv (selector=model)");
    cmd_sweep->add_option("--queries", sweep_args.queries, "queries.tsv (selector=model)");
    cmd_sweep->add_option("--index", sweep_args.index, "index file (selector=model)");
    cmd_sweep->add_option("--collection", sweep_args.collection, "collection.tsv (model+hybrid)");
    cmd_sweep->add_option("--selector-name", sweep_args.selector_name, "name used in the CSV");
    cmd_sweep->add_option("--grid", sweep_args.grid_csv, "comma-separated budget fractions");
    cmd_sweep->add_option("--grid-steps", sweep_args.grid_steps, "uniform grid step count");
    cmd_sweep->add_option("--latency-sparse", sweep_args.latency_sparse, "sparse latency (ms)");
    cmd_sweep->add_option("--latency-dense", sweep_args.latency_dense, "dense latency (ms)");
    auto* sweep_seed = cmd_sweep->add_option("--seed", sweep_args.seed, "seed (selector=random)");
    cmd_sweep->add_flag("--restrict-to-probs", sweep_args.restrict_to_probs,
                        "evaluate only queries covered by the probability file");
    cmd_sweep->add_option("-o,--out", sweep_args.out, "curve CSV output")->required();

    ParetoArgs pareto_args;
    auto* cmd_pareto = app.add_subcommand("pareto", "extract the Pareto frontier from curve CSVs");
    cmd_pareto->add_option("-o,--out", pareto_args.out, "pareto CSV output")->required();
    cmd_pareto->add_option("curves", pareto_args.curves, "curve CSV files")->required();

    GenArgs gen_args;
    auto* cmd_gen = app.add_subcommand("gen-synthetic", "generate the bundled synthetic dataset");
    cmd_gen->add_option("--out-dir", gen_args.out_dir, "output directory")->required();
    cmd_gen->add_option("--docs", gen_args.docs, "total documents");
    cmd_gen->add_option("--exact", gen_args.exact, "exact-match queries");
    cmd_gen->add_option("--mismatch", gen_args.mismatch, "vocabulary-mismatch queries");
    cmd_gen->add_option("--unanswerable", gen_args.unanswerable, "unanswerable queries");
    cmd_gen->add_option("--vocab", gen_args.vocab, "filler vocabulary size");
    auto* gen_seed = cmd_gen->add_option("--seed", gen_args.seed, "generator seed");

    try {
        auto args = expand_config_args(argc, argv);
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        reversed.pop_back();  // program name
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "retsel: error: " << e.what() << "\n";
        return 1;
    }

    ret_args.seed_set = ret_seed->count() > 0;
    train_args.seed_set = train_seed->count() > 0;
    sweep_args.seed_set = sweep_seed->count() > 0;
    gen_args.seed_set = gen_seed->count() > 0;

    try {
        if (cmd_index->parsed()) return run_index(index_args);
        if (cmd_retrieve->parsed()) return run_retrieve(ret_args);
        if (cmd_label->parsed()) return run_label(label_args);
        if (cmd_train->parsed()) return run_train(train_args);
        if (cmd_sweep->parsed()) return run_sweep(sweep_args);
        if (cmd_pareto->parsed()) return run_pareto(pareto_args);
        if (cmd_gen->parsed()) return run_gen(gen_args);
    } catch (const std::exception& e) {
        std::cerr << "retsel: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
