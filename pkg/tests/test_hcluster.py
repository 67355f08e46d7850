import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform

import oracles
from playclust.core import Dendrogram, DissimilarityMatrix, Merge
from playclust.errors import BadK, InvalidMatrix
from playclust.hcluster import agglomerate_ward, cut

PAIRS = np.array([0.0, 0.1, 10.0, 10.1])


def pairs_matrix():
    return DissimilarityMatrix(np.abs(PAIRS[:, None] - PAIRS[None, :]))


def test_separated_pairs_tree():
    dend = agglomerate_ward(pairs_matrix())
    # by hand both close pairs sit 0.1 apart; the float gaps differ only by
    # rounding, so they tie and the pair with the smaller leaf merges first
    assert [(m.left, m.right, m.size) for m in dend.merges] == [(-1, -2, 2), (-3, -4, 2), (1, 2, 4)]
    np.testing.assert_allclose(dend.heights, [0.1, 0.1, 14.142135623730951], rtol=1e-12)
    assert cut(dend, 2).labels.tolist() == [1, 1, 2, 2]


def test_two_leaves():
    dend = agglomerate_ward(DissimilarityMatrix(np.array([[0.0, 3.0], [3.0, 0.0]])))
    assert dend.merges == (Merge(-1, -2, 3.0, 2),)
    with pytest.raises(InvalidMatrix):
        agglomerate_ward(DissimilarityMatrix(np.zeros((1, 1))))


def test_cut_extremes():
    dend = agglomerate_ward(pairs_matrix())
    assert cut(dend, 1).labels.tolist() == [1, 1, 1, 1]
    assert cut(dend, 4).labels.tolist() == [1, 2, 3, 4]
    with pytest.raises(BadK):
        cut(dend, 5)
    with pytest.raises(BadK):
        cut(dend, 0)


def random_matrix(rng, K, integer=False):
    if integer:
        v = rng.integers(1, 4, K * (K - 1) // 2).astype(float)
    else:
        v = rng.uniform(0.1, 10, K * (K - 1) // 2)
    return squareform(v)


def assert_matches_oracle(D):
    dend = agglomerate_ward(DissimilarityMatrix(D))
    expected = oracles.ward_bruteforce(D)
    got = [(m.left, m.right, m.size) for m in dend.merges]
    assert got == [(a, b, n) for a, b, _, n in expected]
    for m, (_, _, crit, _) in zip(dend.merges, expected):
        assert m.height == pytest.approx(math.sqrt(crit), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("seed", range(20))
def test_ward_oracle_with_ties(seed):
    rng = np.random.default_rng(1000 + seed)
    assert_matches_oracle(random_matrix(rng, int(rng.integers(3, 8)), integer=True))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 14), st.integers(0, 2**32 - 1))
def test_ward_matches_scipy(K, seed):
    # scipy's ward on a condensed matrix uses the same update and ranks merges by height
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(K, 3))
    D = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(-1))
    D = (D + D.T) / 2
    np.fill_diagonal(D, 0.0)
    dend = agglomerate_ward(DissimilarityMatrix(D))
    Z = linkage(squareform(D, checks=False), method="ward")
    np.testing.assert_allclose(dend.heights, Z[:, 2], rtol=1e-9)
    np.testing.assert_array_equal([m.size for m in dend.merges], Z[:, 3])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 20), st.integers(0, 2**32 - 1))
def test_cut_properties(K, seed):
    rng = np.random.default_rng(seed)
    dend = agglomerate_ward(DissimilarityMatrix(random_matrix(rng, K)))
    assert isinstance(dend, Dendrogram)
    assert sorted(dend.leaf_order()) == list(range(K))
    assert np.all(np.diff(dend.heights) >= 0)
    prev = None
    for k in range(1, K + 1):
        p = cut(dend, k)
        assert p.k == k and len(p) == K
        if prev is not None:
            # cuts are nested: each finer cluster sits inside one coarser cluster
            for c in range(1, k + 1):
                assert len(set(prev.labels[p.members(c)])) == 1
        prev = p
