"""Agglomerative clustering with Ward linkage on a precomputed dissimilarity matrix."""

from __future__ import annotations

import numpy as np

from .core import Dendrogram, DissimilarityMatrix, Merge, Partition
from .errors import BadK, InvalidMatrix

# candidates within this relative band of the minimum count as tied
TIE_RTOL = 1e-12

# recorded next to every serialized merge list so results are auditable
WARD_CONVENTION = {"linkage": "ward", "ward_input": "squared", "height": "sqrt_criterion"}


def agglomerate_ward(d: DissimilarityMatrix) -> Dendrogram:
    """Build the full Ward merge tree.

    Works on squared dissimilarities with the Lance-Williams update
    ``d(k, i+j)^2 = ((n_i+n_k) d(k,i)^2 + (n_j+n_k) d(k,j)^2 - n_k d(i,j)^2) / (n_i+n_j+n_k)``
    and records the square root of each merge criterion as its height.  A
    merged cluster takes the slot of its smaller member slot, so a slot index
    is always the smallest leaf index it holds; ties go to the smallest
    ``(slot_i, slot_j)`` pair.
    """
    if not isinstance(d, DissimilarityMatrix):
        d = DissimilarityMatrix(np.asarray(d, dtype=float))
    K = d.size
    if K < 2:
        raise InvalidMatrix(f"need at least 2 items to cluster, got {K}")

    d2 = np.square(d.entries)
    scale = float(d2.max()) or 1.0
    work = np.where(np.triu(np.ones((K, K), dtype=bool), k=1), d2, np.inf)
    size = np.ones(K, dtype=np.int64)
    node = -(np.arange(K) + 1)
    active = np.ones(K, dtype=bool)
    merges = []

    for step in range(1, K):
        best = work.min()
        flat = np.flatnonzero(work.ravel() <= best + TIE_RTOL * max(best, scale))
        i, j = divmod(int(flat[0]), K)
        crit = d2[i, j]
        merges.append(Merge(int(node[i]), int(node[j]), float(np.sqrt(best)), int(size[i] + size[j])))

        ni, nj = size[i], size[j]
        others = np.flatnonzero(active)
        others = others[(others != i) & (others != j)]
        nk = size[others]
        updated = ((ni + nk) * d2[others, i] + (nj + nk) * d2[others, j] - nk * crit) / (ni + nj + nk)
        # exact value is >= best since best was the global minimum; undo rounding drift
        np.maximum(updated, best, out=updated)
        d2[others, i] = updated
        d2[i, others] = updated
        lower = others < i
        work[others[lower], i] = updated[lower]
        work[i, others[~lower]] = updated[~lower]
        work[j, :] = np.inf
        work[:, j] = np.inf
        active[j] = False
        size[i] = ni + nj
        node[i] = step

    return Dendrogram(tuple(merges), K)


def cut(dend: Dendrogram, k: int) -> Partition:
    """Undo the last ``k - 1`` merges and label groups 1..k by first leaf."""
    K = dend.leaf_count
    if not 1 <= k <= K:
        raise BadK(f"k must be in [1, {K}], got {k}")
    parent = list(range(K))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    # representative leaf of each internal node
    rep = {}
    for m, merge in enumerate(dend.merges[:K - k], start=1):
        a = -merge.left - 1 if merge.left < 0 else rep[merge.left]
        b = -merge.right - 1 if merge.right < 0 else rep[merge.right]
        ra, rb = find(a), find(b)
        parent[max(ra, rb)] = min(ra, rb)
        rep[m] = min(ra, rb)

    return Partition.from_labels([find(i) for i in range(K)])
