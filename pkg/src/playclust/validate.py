"""Internal validity indices and partition-comparison scores."""

from __future__ import annotations

import math

import numpy as np

from .core import DissimilarityMatrix, Partition
from .errors import DegenerateMatrix, LengthMismatch, SingleCluster


class DegenerateDiameter:
    """Returned by :func:`dunn` when every cluster has zero diameter.

    The index is unbounded in that case; a sentinel keeps it out of numeric
    comparisons by accident.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DEGENERATE_DIAMETER"

    def __reduce__(self):
        return (DegenerateDiameter, ())


DEGENERATE_DIAMETER = DegenerateDiameter()


def _inputs(d, p: Partition) -> tuple[np.ndarray, np.ndarray]:
    D = np.asarray(d.entries if isinstance(d, DissimilarityMatrix) else d, dtype=float)
    labels = np.asarray(p.labels)
    if D.shape != (labels.size, labels.size):
        raise LengthMismatch(f"matrix of size {D.shape[0]} vs {labels.size} labels")
    if p.k < 2:
        raise SingleCluster("index needs at least 2 clusters")
    return D, labels


def silhouette_samples(d, p: Partition) -> np.ndarray:
    D, labels = _inputs(d, p)
    n = labels.size
    onehot = labels[:, None] == np.arange(1, p.k + 1)[None, :]
    sizes = onehot.sum(axis=0)
    sums = D @ onehot
    own = sizes[labels - 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        a = sums[np.arange(n), labels - 1] / np.maximum(own - 1, 1)
        means = sums / sizes
    means[np.arange(n), labels - 1] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    s = np.zeros(n)
    ok = (own > 1) & (denom > 0)
    s[ok] = (b[ok] - a[ok]) / denom[ok]
    return s


def silhouette_avg(d, p: Partition) -> float:
    """Mean silhouette width; members of singleton clusters score 0."""
    return float(silhouette_samples(d, p).mean())


def dunn(d, p: Partition) -> float | DegenerateDiameter:
    """Smallest between-cluster distance over the largest cluster diameter."""
    D, labels = _inputs(d, p)
    same = labels[:, None] == labels[None, :]
    diameter = float(D[same].max())
    separation = float(D[~same].min())
    if diameter == 0:
        return DEGENERATE_DIAMETER
    return separation / diameter


def hubert_gamma(d, p: Partition) -> float:
    """Normalized Hubert statistic: correlation of distances with 0/1 between-cluster indicator."""
    D, labels = _inputs(d, p)
    iu = np.triu_indices(labels.size, k=1)
    x = D[iu]
    q = (labels[:, None] != labels[None, :])[iu].astype(float)
    if x.size == 0 or np.all(x == x[0]):
        raise DegenerateMatrix("dissimilarities are constant over all pairs")
    if np.all(q == q[0]):
        raise DegenerateMatrix("membership indicator is constant over all pairs")
    xc, qc = x - x.mean(), q - q.mean()
    return float(np.dot(xc, qc) / math.sqrt(np.dot(xc, xc) * np.dot(qc, qc)))


def _labels(p) -> np.ndarray:
    return np.asarray(p.labels if isinstance(p, Partition) else p)


def contingency(p, q) -> np.ndarray:
    a, b = _labels(p), _labels(q)
    if a.size != b.size:
        raise LengthMismatch(f"partitions cover {a.size} and {b.size} items")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    return table


def variation_of_information(p, q) -> float:
    """``H(p) + H(q) - 2 I(p, q)`` in nats.

    Summed per cell as ``-r_ij (log(n_ij / n_i) + log(n_ij / n_j))``, which is
    exactly zero when the partitions agree up to relabelling.
    """
    table = contingency(p, q)
    n = int(table.sum())
    rows = table.sum(axis=1, keepdims=True)
    cols = table.sum(axis=0, keepdims=True)
    nz = table > 0
    nij = table[nz].astype(float)
    terms = nij / n * (np.log(nij / np.broadcast_to(rows, table.shape)[nz])
                       + np.log(nij / np.broadcast_to(cols, table.shape)[nz]))
    return max(0.0, float(-terms.sum()))


def _pairs(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def adjusted_rand(p, q) -> float:
    """Hubert-Arabie adjusted Rand index."""
    table = contingency(p, q)
    n = int(table.sum())
    index = int(_pairs(table).sum())
    rows = int(_pairs(table.sum(axis=1)).sum())
    cols = int(_pairs(table.sum(axis=0)).sum())
    total = n * (n - 1) // 2
    expected = rows * cols / total if total else 0.0
    maximum = (rows + cols) / 2
    if maximum == expected:
        return 1.0
    return (index - expected) / (maximum - expected)
