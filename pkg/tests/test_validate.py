import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from playclust.core import Partition
from playclust.errors import DegenerateMatrix, LengthMismatch, SingleCluster
from playclust.validate import (
    DEGENERATE_DIAMETER,
    adjusted_rand,
    contingency,
    dunn,
    hubert_gamma,
    silhouette_avg,
    silhouette_samples,
    variation_of_information,
)

PAIRS = np.array([0.0, 0.1, 10.0, 10.1])
D_PAIRS = np.abs(PAIRS[:, None] - PAIRS[None, :])
P_PAIRS = Partition(np.array([1, 1, 2, 2]), 2)

labels_st = st.lists(st.integers(1, 4), min_size=2, max_size=30)


def test_separated_pairs_indices():
    assert silhouette_avg(D_PAIRS, P_PAIRS) == pytest.approx(0.990, abs=1e-3)
    assert silhouette_avg(D_PAIRS, P_PAIRS) == pytest.approx(oracles.silhouette(D_PAIRS, [1, 1, 2, 2]), abs=1e-12)
    assert dunn(D_PAIRS, P_PAIRS) == 99.0
    assert hubert_gamma(D_PAIRS, P_PAIRS) > 0.99


def test_singletons_and_degenerate_cases():
    D = np.array([[0, 1, 5], [1, 0, 5], [5, 5, 0]], dtype=float)
    s = silhouette_samples(D, Partition(np.array([1, 1, 2]), 2))
    assert s[2] == 0.0
    assert dunn(np.array([[0, 3], [3, 0.0]]), Partition(np.array([1, 2]), 2)) is DEGENERATE_DIAMETER
    with pytest.raises(SingleCluster):
        silhouette_avg(D, Partition(np.array([1, 1, 1]), 1))
    with pytest.raises(DegenerateMatrix):
        hubert_gamma(np.ones((3, 3)) - np.eye(3), Partition(np.array([1, 1, 2]), 2))
    with pytest.raises(LengthMismatch):
        silhouette_avg(D, Partition(np.array([1, 2]), 2))


def test_hubert_random_labels_small():
    rng = np.random.default_rng(0)
    vals = []
    for _ in range(100):
        X = rng.uniform(size=(20, 2))
        D = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1))
        labels = rng.integers(1, 4, 20)
        vals.append(abs(hubert_gamma(D, Partition.from_labels(labels))))
    assert np.mean(vals) < 0.3


def test_vi_and_ari_fixtures():
    n = 6
    assert variation_of_information([1] * n, list(range(n))) == pytest.approx(math.log(n), abs=1e-12)
    assert adjusted_rand([1, 1, 2, 2], [1, 2, 1, 2]) == pytest.approx(-0.5, abs=1e-12)
    assert contingency([1, 1, 2], [3, 4, 4]).tolist() == [[1, 1], [0, 1]]
    with pytest.raises(LengthMismatch):
        adjusted_rand([1, 2], [1, 2, 3])


@settings(max_examples=100, deadline=None)
@given(labels_st, st.integers(0, 2**32 - 1))
def test_ari_vi_match_oracles(p, seed):
    q = list(np.random.default_rng(seed).integers(1, 4, len(p)))
    assert adjusted_rand(p, q) == pytest.approx(oracles.ari_pairs(p, q), abs=1e-12)
    assert variation_of_information(p, q) == pytest.approx(oracles.vi_direct(p, q), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(labels_st, st.permutations([1, 2, 3, 4]))
def test_relabel_invariance(p, perm):
    q = [perm[x - 1] for x in p]
    assert variation_of_information(p, p) == 0.0
    assert variation_of_information(p, q) == pytest.approx(0.0, abs=1e-12)
    assert adjusted_rand(p, q) == 1.0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_silhouette_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 12))
    X = rng.uniform(size=(n, 2))
    D = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1))
    labels = rng.integers(1, 4, n)
    p = Partition.from_labels(labels)
    if p.k < 2:
        return
    s = silhouette_avg(D, p)
    assert -1.0 <= s <= 1.0
    assert s == pytest.approx(oracles.silhouette(D.tolist(), p.labels.tolist()), abs=1e-12)
