"""Smoke tests for the python bindings: a miniature end-to-end pass plus
cross-checks against numpy for the dense side."""

import math
import random

import numpy as np
import pytest

import retsel


def make_corpus(rng, n_docs=120, vocab=30, max_len=12):
    docs = []
    for i in range(n_docs):
        length = rng.randrange(max_len + 1)
        text = " ".join(f"t{rng.randrange(vocab)}" for _ in range(length))
        docs.append(retsel.TextRecord(f"doc{i:04d}", text))
    return docs


def test_tokenize():
    assert retsel.tokenize("Hello, World!") == ["hello", "world"]
    assert retsel.tokenize("") == []
    assert retsel.tokenize("BM25-based retrieval") == ["bm25", "based", "retrieval"]


def test_bm25_hand_value():
    index = retsel.InvertedIndex.build([retsel.TextRecord("d1", "cat")], retsel.Bm25Params(0.9, 0.4))
    assert index.score(["cat"], 0) == pytest.approx(math.log(4.0 / 3.0), abs=1e-9)


def test_wand_matches_exhaustive():
    rng = random.Random(1234)
    docs = make_corpus(rng)
    index = retsel.InvertedIndex.build(docs)
    for _ in range(25):
        query = [f"t{rng.randrange(32)}" for _ in range(1 + rng.randrange(5))]
        for k in (1, 5, 50):
            a = retsel.search_exhaustive(index, query, k)
            b = retsel.search_wand(index, query, k)
            assert [(e.doc_id, e.score) for e in a.entries] == [(e.doc_id, e.score) for e in b.entries]


def test_wand_prunes():
    rng = random.Random(7)
    docs = make_corpus(rng, n_docs=800, vocab=40, max_len=20)
    index = retsel.InvertedIndex.build(docs)
    run, stats = retsel.search_wand_stats(index, ["t1", "t2", "t3"], 1)
    assert len(run) == 1
    assert stats.fully_scored < stats.candidates


def test_dense_against_numpy():
    rng = np.random.default_rng(42)
    vectors = rng.standard_normal((200, 16))
    store = retsel.EmbeddingStore(16)
    for i in range(200):
        store.add(f"d{i:03d}", [float(x) for x in vectors[i]])
    query = rng.standard_normal(16)

    got = retsel.search_dense(store, [float(x) for x in query], 10)
    dots = vectors @ query
    want = np.argsort(-dots, kind="stable")[:10]  # ids are ordinal-sorted, ties impossible here
    assert [e.doc_id for e in got.entries] == [f"d{i:03d}" for i in want]
    for e, i in zip(got.entries, want):
        assert e.score == pytest.approx(float(dots[i]), abs=1e-9)


def test_synthetic_embeddings_unit_norm():
    records = [retsel.TextRecord("a", "x y z"), retsel.TextRecord("b", "")]
    store = retsel.embed_synthetic(records, 8, 3)
    for doc_id in ("a", "b"):
        assert np.linalg.norm(store.vector_of(doc_id)) == pytest.approx(1.0, abs=1e-9)


def test_labeling_rule():
    assert retsel.label_query("q", 50, 50, retsel.Scheme.DENSE).label == retsel.Strategy.SPARSE
    assert retsel.label_query("q", 51, 50, retsel.Scheme.DENSE).label == retsel.Strategy.ALT
    assert retsel.label_query("q", None, 50, retsel.Scheme.DENSE).label == retsel.Strategy.ALT


def test_end_to_end_mini_pipeline(tmp_path):
    spec = retsel.SyntheticSpec()
    spec.n_docs, spec.n_exact, spec.n_mismatch, spec.n_unanswerable = 400, 8, 8, 4
    spec.vocab, spec.seed = 150, 11
    data = retsel.generate_synthetic(spec)

    index = retsel.InvertedIndex.build(data.collection)
    store = retsel.embed_synthetic(data.collection, 32, 11, data.aliases)

    runs, dense_runs = {}, {}
    for q in data.queries:
        sparse = retsel.search_wand(index, retsel.tokenize(q.text), 100)
        sparse.query_id = q.id
        runs[q.id] = sparse
        dense = retsel.search_dense(store, retsel.embed_text(q.text, 32, 11, data.aliases), 100)
        dense.query_id = q.id
        dense_runs[q.id] = dense

    report = retsel.label_all(runs, data.qrels, 50, retsel.Scheme.DENSE)
    assert len(report.labels) == 20
    n_sparse = sum(1 for l in report.labels.values() if l.label == retsel.Strategy.SPARSE)
    assert n_sparse == 8  # the exact-match population

    recalls = []
    for qid, relevant in data.qrels.items():
        recalls.append(
            retsel.PerQueryRecall(
                qid,
                retsel.recall_at_k(runs[qid], relevant, 100),
                retsel.recall_at_k(dense_runs[qid], relevant, 100),
            )
        )

    probs = retsel.oracle_selector(report.labels)
    grid = [0.0, 0.5, 1.0]
    lat = retsel.LatencyModel(55.0, 103.0)
    curve = retsel.budget_sweep(probs, recalls, lat, retsel.Scheme.DENSE, grid, "oracle")
    base = retsel.random_baseline(recalls, lat, retsel.Scheme.DENSE, grid)

    assert curve.points[0].mean_latency_ms == 55.0
    assert curve.points[-1].mean_latency_ms == 103.0
    assert curve.points[0].mean_recall == base.points[0].mean_recall
    for pt, bpt in zip(curve.points, base.points):
        assert pt.mean_recall >= bpt.mean_recall - 1e-12

    # independent recount of the oracle point at f=0.5
    n = math.ceil(0.5 * len(recalls))
    order = sorted(recalls, key=lambda r: (-probs[r.query_id], r.query_id))
    chosen = {r.query_id for r in order[:n]}
    expected = sum(r.alt if r.query_id in chosen else r.sparse for r in recalls) / len(recalls)
    assert curve.points[1].mean_recall == pytest.approx(expected, abs=1e-12)

    csv_path = tmp_path / "curve.csv"
    retsel.save_curves_csv(str(csv_path), [curve, base], ["origin=smoke"])
    points = retsel.load_curve_csv(str(csv_path))
    frontier = retsel.pareto_frontier(points)
    assert frontier, "frontier must not be empty"
    assert all(
        frontier[i].latency_ms < frontier[i + 1].latency_ms
        and frontier[i].recall < frontier[i + 1].recall
        for i in range(len(frontier) - 1)
    )


def test_pareto_hand_example():
    pts = [
        retsel.ParetoPoint(55.0, 0.86),
        retsel.ParetoPoint(103.0, 0.96),
        retsel.ParetoPoint(80.0, 0.80),
    ]
    front = retsel.pareto_frontier(pts)
    assert [(p.latency_ms, p.recall) for p in front] == [(55.0, 0.86), (103.0, 0.96)]


def test_selector_training_signal():
    rng = random.Random(3)
    x, y = [], []
    for i in range(60):
        cls = i % 2
        base = 2.0 if cls else -2.0
        x.append([base + rng.random(), rng.random(), 0.0, 0.0, 0.0])
        y.append(cls)
    opts = retsel.TrainOptions()
    opts.learning_rate, opts.epochs = 0.5, 800
    result = retsel.train_selector(x, y, retsel.Scheme.DENSE, opts)
    correct = sum((result.model.predict(xi) >= 0.5) == bool(yi) for xi, yi in zip(x, y))
    assert correct == len(x)
    assert result.loss_history[-1] < result.loss_history[0]


def test_errors_surface_as_exceptions(tmp_path):
    with pytest.raises(RuntimeError):
        retsel.load_collection(str(tmp_path / "missing.tsv"))
    bad = tmp_path / "p.tsv"
    bad.write_text("q1\t1.5\n")
    with pytest.raises(RuntimeError):
        retsel.load_probabilities(str(bad))
