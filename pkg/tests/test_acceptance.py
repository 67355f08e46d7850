"""Acceptance suite: one test per criterion, summarized as PASS/FAIL lines at the end of the run.

Run on its own with ``pytest tests/test_acceptance.py -v``.
"""

import filecmp
import math
import time

import numpy as np
import pytest

import fixtures as fx
import oracles
from playclust.cli import main
from playclust.cohort import ChurnConfig, CohortConfig, SubjectAttributes, churn_table, ingest, qualifying_subjects
from playclust.core import DissimilarityMatrix, Partition, znormalize
from playclust.dissim import MeasureConfig, cid, complexity_estimate, cor_index, cort_index, dtw, euclidean
from playclust.hcluster import agglomerate_ward
from playclust.pipeline import cluster_series
from playclust.represent import SaxConfig, dwt_dissim, extract_trend, paa, paa_expand, sax_mindist, sax_symbols
from playclust.synthgen import make_benchmark
from playclust.validate import adjusted_rand, dunn, silhouette_avg, variation_of_information

SEEDS = range(10)


def test_ac01_formula_oracles():
    start = time.perf_counter()
    rng = np.random.default_rng(20150611)
    for _ in range(200):
        x, y = rng.uniform(0, 10, 21), rng.uniform(0, 10, 21)
        xl, yl = x.tolist(), y.tolist()
        assert abs(euclidean(x, y) - oracles.euclid(xl, yl)) <= 1e-9
        assert abs(cor_index(x, y) - oracles.pearson(xl, yl)) <= 1e-9
        assert abs(cort_index(x, y) - oracles.cort(xl, yl)) <= 1e-9
        assert abs(complexity_estimate(x) - oracles.complexity(xl)) <= 1e-9
        assert abs(cid(x, y) - oracles.cid(xl, yl)) <= 1e-9
    for i in range(200):
        # every tenth pair uses the full 8 x 8 grid
        n, m = (8, 8) if i % 10 == 0 else rng.integers(1, 9, 2)
        x, y = rng.uniform(0, 10, n), rng.uniform(0, 10, m)
        assert dtw(x, y) == oracles.dtw_recursive(x.tolist(), y.tolist())
    elapsed = time.perf_counter() - start
    assert elapsed < 10, f"runtime {elapsed:.1f}s"


def test_ac02_ward_bruteforce_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    for trial in range(100):
        K = int(rng.integers(2, 8))
        n = K * (K - 1) // 2
        # half the matrices use a three-value alphabet so exact ties are frequent
        v = rng.integers(1, 4, n).astype(float) if trial % 2 else rng.uniform(0.1, 10, n)
        D = np.zeros((K, K))
        D[np.triu_indices(K, 1)] = v
        D = D + D.T
        dend = agglomerate_ward(DissimilarityMatrix(D))
        expected = oracles.ward_bruteforce(D.tolist())
        assert [(m.left, m.right, m.size) for m in dend.merges] == [(a, b, s) for a, b, _, s in expected]
        for m, (_, _, crit, _) in zip(dend.merges, expected):
            assert m.height == pytest.approx(math.sqrt(crit), rel=1e-12, abs=1e-15)
    elapsed = time.perf_counter() - start
    assert elapsed < 30, f"runtime {elapsed:.1f}s"


def test_ac03_cor_trend_recovers_synchronized_shapes():
    start = time.perf_counter()
    scores = []
    for seed in SEEDS:
        series, truth = make_benchmark("shape", seed)
        result = cluster_series(series, "cor-trend", k=4)
        scores.append(adjusted_rand(truth, result.partition))
    elapsed = time.perf_counter() - start
    print("shape benchmark ARI per seed:", [round(s, 3) for s in scores])
    assert min(scores) >= 0.9
    assert elapsed < 60, f"runtime {elapsed:.1f}s"


def test_ac04_dtw_tolerates_phase_shift():
    rows = []
    for seed in SEEDS:
        series, truth = make_benchmark("phase", seed)
        a_dtw = adjusted_rand(truth, cluster_series(series, k=3, measure=MeasureConfig("dtw")).partition)
        a_euc = adjusted_rand(truth, cluster_series(series, k=3, measure=MeasureConfig("euclidean")).partition)
        rows.append((seed, a_dtw, a_euc))
    print("phase benchmark (seed, ARI dtw, ARI euclidean):", [(s, round(a, 3), round(b, 3)) for s, a, b in rows])
    for seed, a_dtw, a_euc in rows:
        assert a_dtw >= 0.8, seed
        assert a_euc < a_dtw, seed


def test_ac05_cid_separates_sparse_complexity():
    rows = []
    for seed in SEEDS:
        series, truth = make_benchmark("sparse", seed)
        a_cid = adjusted_rand(truth, cluster_series(series, "cid-raw", k=3).partition)
        a_cor = adjusted_rand(truth, cluster_series(series, "cor-trend", k=3).partition)
        rows.append((seed, a_cid, a_cor))
    print("sparse benchmark (seed, ARI cid-raw, ARI cor-trend):", [(s, round(a, 3), round(b, 3)) for s, a, b in rows])
    for seed, a_cid, a_cor in rows:
        assert a_cid >= 0.8, seed
        assert a_cor < a_cid, seed


def test_ac06_lower_bounds():
    rng = np.random.default_rng(6)
    violations = 0
    for i in range(500):
        x = znormalize(rng.normal(size=21))
        y = znormalize(rng.normal(size=21))
        e = euclidean(x, y)
        cfg = SaxConfig(7, (3, 5, 8)[i % 3])
        if sax_mindist(sax_symbols(x, cfg), sax_symbols(y, cfg), 21, cfg) > e:
            violations += 1
        if euclidean(paa_expand(paa(x, 7), 21), paa_expand(paa(y, 7), 21)) > e:
            violations += 1
    assert violations == 0

    # Haar needs an even length; 28 = 4 * 7 allows two decomposition levels
    for _ in range(500):
        x = znormalize(rng.normal(size=28))
        y = znormalize(rng.normal(size=28))
        e = euclidean(x, y)
        assert abs(dwt_dissim(x, y, level=2, keep=28) - e) <= 1e-9
        dists = [dwt_dissim(x, y, level=2, keep=k) for k in range(29)]
        # truncating coefficients can only shrink the distance: every prefix is a
        # lower bound, and the remaining gap to the full distance never grows with keep
        gaps = [e - d for d in dists]
        assert all(g2 <= g1 + 1e-12 for g1, g2 in zip(gaps, gaps[1:]))
        assert all(d <= e + 1e-9 for d in dists)


def test_ac07_trend_exactness():
    rng = np.random.default_rng(7)
    t = np.arange(21.0)
    interior = slice(3, 18)
    for _ in range(200):
        a, b = rng.uniform(-5, 5, 2)
        line = a + b * t
        assert np.max(np.abs(extract_trend(line, 7)[interior] - line[interior])) <= 1e-9
        amp, phase = rng.uniform(0.1, 5), rng.uniform(0, 2 * np.pi)
        wavy = line + amp * np.sin(2 * np.pi * t / 7 + phase)
        assert np.max(np.abs(extract_trend(wavy, 7)[interior] - line[interior])) <= 1e-9


def test_ac08_validation_indices():
    x = np.array([0.0, 0.1, 10.0, 10.1])
    D = np.abs(x[:, None] - x[None, :])
    p = Partition(np.array([1, 1, 2, 2]), 2)
    assert abs(silhouette_avg(D, p) - 0.990) <= 0.001
    assert dunn(D, p) == 99
    rng = np.random.default_rng(8)
    for _ in range(200):
        n, k = int(rng.integers(2, 60)), int(rng.integers(1, 8))
        labels = rng.integers(1, k + 1, n)
        relabel = rng.permutation(np.arange(1, k + 1))
        assert variation_of_information(labels, labels) == 0
        assert adjusted_rand(labels, relabel[labels - 1]) == 1


def test_ac09_cohort_filters_and_churn():
    store = ingest(fx.activity_text(), fx.attributes_text())
    assert len(store.attributes) == 30
    assert qualifying_subjects(store, CohortConfig(fx.P_START)) == fx.EXPECTED_TIME
    assert qualifying_subjects(store, CohortConfig(fx.P_START, variable_kind="purchase")) == fx.EXPECTED_PURCHASE
    attrs = {
        sid: SubjectAttributes(sid, fx.P_START, level, bool(payer), last)
        for sid, (payer, level, last) in fx.CHURN_ATTRS.items()
    }
    p = Partition(np.array(fx.CHURN_LABELS), 2, tuple(fx.CHURN_IDS))
    table = churn_table(p, attrs, ChurnConfig(fx.CHURN_CHECKPOINTS, 30))
    np.testing.assert_allclose(table.ratios, fx.CHURN_EXPECTED, rtol=0, atol=1e-12)
    assert np.all(np.diff(table.ratios, axis=0) >= 0)


def test_ac10_pipeline_determinism(tmp_path):
    cfg = tmp_path / "pipeline.cfg"
    cfg.write_text("synth_kind = shape\nseed = 5\npreset = cor-trend\nk = 4\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["pipeline", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["pipeline", "--config", str(cfg), "--out", str(b)]) == 0
    names = sorted(f.name for f in a.iterdir())
    assert names == sorted(f.name for f in b.iterdir())
    assert {"labels.csv", "merges.txt", "matrix.txt", "series.csv"} <= set(names)
    assert sum(n.endswith(".svg") for n in names) == 4
    match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    assert mismatch == [] and errors == []
