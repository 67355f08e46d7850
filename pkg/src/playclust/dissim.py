"""Pairwise dissimilarity measures between time series.

Each measure is split into a per-series ``prepare`` step (centering,
differencing, complexity estimate, ...) and a per-pair step.  The public
scalar functions and :func:`pairwise_matrix` share both steps, so a matrix
cell is bit-identical to the corresponding scalar call.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Mapping, NamedTuple, Sequence

import numpy as np
from numba import njit

from .core import DissimilarityMatrix, SeriesSet, znormalize
from .errors import (
    BadConfig,
    ConstantSeries,
    EmptySeries,
    FlatDifferences,
    LengthMismatch,
    PlayclustError,
    TooShort,
)
from .represent import SaxConfig, dwt_haar, sax_mindist, sax_symbols

MEASURES = ("euclidean", "cor", "cort", "dtw", "cid", "sax", "dwt")


@dataclass(frozen=True)
class MeasureConfig:
    """Which dissimilarity to use, with its tuning constants.

    ``cort_k`` sets the steepness of the adaptive CORT weight and
    ``ce_epsilon`` floors the complexity denominator of CID.  The ``sax`` and
    ``dwt`` measures compare reduced representations and read their own
    parameters.
    """

    measure: str = "euclidean"
    cort_k: float = 2.0
    ce_epsilon: float = 1e-12
    sax: SaxConfig | None = None
    dwt_level: int = 1
    dwt_keep: int | None = None

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise BadConfig(f"unknown measure {self.measure!r}; expected one of {', '.join(MEASURES)}")
        if not self.cort_k >= 0:
            raise BadConfig(f"cort_k must be >= 0, got {self.cort_k}")
        if not self.ce_epsilon > 0:
            raise BadConfig(f"ce_epsilon must be > 0, got {self.ce_epsilon}")
        if self.measure == "sax" and self.sax is None:
            raise BadConfig("measure 'sax' needs a SaxConfig")
        if self.dwt_level < 1:
            raise BadConfig(f"dwt_level must be >= 1, got {self.dwt_level}")

    def as_tag(self) -> dict[str, Any]:
        """Provenance record holding only the parameters the measure reads."""
        tag: dict[str, Any] = {"measure": self.measure}
        if self.measure == "cort":
            tag["cort_k"] = self.cort_k
        elif self.measure == "cid":
            tag["ce_epsilon"] = self.ce_epsilon
        elif self.measure == "sax":
            tag["sax_w"] = self.sax.w
            tag["sax_alpha"] = self.sax.alpha
        elif self.measure == "dwt":
            tag["dwt_level"] = self.dwt_level
            tag["dwt_keep"] = self.dwt_keep
        return tag

    @classmethod
    def from_tag(cls, tag: Mapping[str, Any]) -> "MeasureConfig":
        kwargs: dict[str, Any] = {"measure": tag["measure"]}
        if "cort_k" in tag:
            kwargs["cort_k"] = float(tag["cort_k"])
        if "ce_epsilon" in tag:
            kwargs["ce_epsilon"] = float(tag["ce_epsilon"])
        if "sax_w" in tag:
            kwargs["sax"] = SaxConfig(int(tag["sax_w"]), int(tag["sax_alpha"]))
        if "dwt_level" in tag:
            kwargs["dwt_level"] = int(tag["dwt_level"])
            keep = tag.get("dwt_keep")
            kwargs["dwt_keep"] = None if keep in (None, "None") else int(keep)
        return cls(**kwargs)


def _vec(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise PlayclustError(f"expected a 1-D series, got shape {arr.shape}")
    return arr


def _check_same_length(x: np.ndarray, y: np.ndarray) -> None:
    if x.size != y.size:
        raise LengthMismatch(f"series lengths differ: {x.size} vs {y.size}")


# --- Euclidean -------------------------------------------------------------

def _euclid(x: np.ndarray, y: np.ndarray) -> float:
    _check_same_length(x, y)
    return math.sqrt(float(np.dot(x - y, x - y)))


def euclidean(x, y) -> float:
    return _euclid(_vec(x), _vec(y))


# --- COR -------------------------------------------------------------------

class _Centered(NamedTuple):
    raw: np.ndarray
    dev: np.ndarray
    ss: float
    flat: bool


def _prep_cor(x: np.ndarray) -> _Centered:
    dev = x - x.mean()
    scale = float(np.max(np.abs(dev))) if x.size else 0.0
    if scale > 0:
        # correlation is scale-free; rescaling keeps tiny spreads from underflowing when squared
        dev = dev / scale
    ss = float(np.dot(dev, dev))
    return _Centered(x, dev, ss, bool(x.size == 0 or ss == 0 or np.all(x == x[0])))


def _cor_pair(a: _Centered, b: _Centered) -> float:
    _check_same_length(a.raw, b.raw)
    if a.flat or b.flat:
        raise ConstantSeries("Pearson correlation is undefined for a constant series")
    r = float(np.dot(a.dev, b.dev)) / (math.sqrt(a.ss) * math.sqrt(b.ss))
    return min(1.0, max(-1.0, r))


def cor_index(x, y) -> float:
    """Pearson correlation between two equal-length series."""
    return _cor_pair(_prep_cor(_vec(x)), _prep_cor(_vec(y)))


def _cor_dissim_pair(a: _Centered, b: _Centered) -> float:
    return math.sqrt(2.0 * (1.0 - _cor_pair(a, b)))


def cor_dissim(x, y) -> float:
    """Correlation distance ``sqrt(2 (1 - r))``, in ``[0, 2]``."""
    return _cor_dissim_pair(_prep_cor(_vec(x)), _prep_cor(_vec(y)))


# --- CORT ------------------------------------------------------------------

class _Increments(NamedTuple):
    raw: np.ndarray
    diff: np.ndarray
    ss: float


def _prep_cort(x: np.ndarray) -> _Increments:
    if x.size < 2:
        raise TooShort("temporal correlation needs at least 2 values")
    d = np.diff(x)
    scale = float(np.max(np.abs(d)))
    if scale > 0:
        d = d / scale
    return _Increments(x, d, float(np.dot(d, d)))


def _cort_pair(a: _Increments, b: _Increments) -> float:
    _check_same_length(a.raw, b.raw)
    if a.ss == 0 or b.ss == 0:
        raise FlatDifferences("temporal correlation is undefined when a series has no increments")
    r = float(np.dot(a.diff, b.diff)) / (math.sqrt(a.ss) * math.sqrt(b.ss))
    return min(1.0, max(-1.0, r))


def cort_index(x, y) -> float:
    """Correlation of first differences (temporal correlation)."""
    return _cort_pair(_prep_cort(_vec(x)), _prep_cort(_vec(y)))


def cort_weight(u: float, k: float) -> float:
    """Adaptive weight ``2 / (1 + exp(k u))``; equals 1 for ``k = 0``."""
    z = k * u
    if z > 700:
        return 0.0
    return 2.0 / (1.0 + math.exp(z))


def _cort_dissim_pair(a: _Increments, b: _Increments, k: float) -> float:
    return cort_weight(_cort_pair(a, b), k) * _euclid(a.raw, b.raw)


def cort_dissim(x, y, k: float = 2.0) -> float:
    if k < 0:
        raise BadConfig(f"k must be >= 0, got {k}")
    return _cort_dissim_pair(_prep_cort(_vec(x)), _prep_cort(_vec(y)), k)


# --- DTW -------------------------------------------------------------------

@njit(cache=True)
def _dtw_kernel(x, y):
    n = x.shape[0]
    m = y.shape[0]
    prev = np.empty(m)
    cur = np.empty(m)
    acc = 0.0
    for j in range(m):
        acc = abs(x[0] - y[j]) + (acc if j > 0 else 0.0)
        prev[j] = acc
    for i in range(1, n):
        cur[0] = abs(x[i] - y[0]) + prev[0]
        for j in range(1, m):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = abs(x[i] - y[j]) + best
        prev, cur = cur, prev
    return prev[m - 1]


def _prep_dtw(x: np.ndarray) -> np.ndarray:
    if x.size == 0:
        raise EmptySeries("DTW needs non-empty series")
    return np.ascontiguousarray(x)


def _dtw_pair(x: np.ndarray, y: np.ndarray) -> float:
    return float(_dtw_kernel(x, y))


def dtw(x, y) -> float:
    """Unconstrained DTW with absolute-difference cost and unit steps.

    Lengths may differ.  Runs the full O(|x| |y|) dynamic program.
    """
    return _dtw_pair(_prep_dtw(_vec(x)), _prep_dtw(_vec(y)))


# --- CID -------------------------------------------------------------------

def complexity_estimate(x) -> float:
    """Root of the summed squared first differences."""
    x = _vec(x)
    if x.size < 2:
        raise TooShort("complexity estimate needs at least 2 values")
    d = np.diff(x)
    return math.sqrt(float(np.dot(d, d)))


def correction_factor(ce_x: float, ce_y: float, eps: float = 1e-12) -> float:
    """Complexity correction ``max(CE) / min(CE)``, both floored at ``eps`` so it never drops below 1."""
    hi, lo = max(ce_x, ce_y, eps), max(min(ce_x, ce_y), eps)
    return hi / lo


class _Complexity(NamedTuple):
    raw: np.ndarray
    ce: float


def _prep_cid(x: np.ndarray) -> _Complexity:
    return _Complexity(x, complexity_estimate(x))


def _cid_pair(a: _Complexity, b: _Complexity, eps: float) -> float:
    return _euclid(a.raw, b.raw) * correction_factor(a.ce, b.ce, eps)


def cid(x, y, eps: float = 1e-12) -> float:
    """Complexity-invariant distance: Euclidean scaled by the complexity ratio."""
    if not eps > 0:
        raise BadConfig(f"eps must be > 0, got {eps}")
    x, y = _vec(x), _vec(y)
    _check_same_length(x, y)
    return _cid_pair(_prep_cid(x), _prep_cid(y), eps)


# --- dispatch --------------------------------------------------------------

def _kernels(cfg: MeasureConfig) -> tuple[Callable, Callable]:
    m = cfg.measure
    if m == "euclidean":
        return (lambda x: x), _euclid
    if m == "cor":
        return _prep_cor, _cor_dissim_pair
    if m == "cort":
        k = cfg.cort_k
        return _prep_cort, lambda a, b: _cort_dissim_pair(a, b, k)
    if m == "dtw":
        return _prep_dtw, _dtw_pair
    if m == "cid":
        eps = cfg.ce_epsilon
        return _prep_cid, lambda a, b: _cid_pair(a, b, eps)
    if m == "sax":
        sax = cfg.sax
        return (
            lambda x: (sax_symbols(znormalize(x), sax), x.size),
            lambda a, b: sax_mindist(a[0], b[0], a[1], sax),
        )
    if m == "dwt":
        level, keep = cfg.dwt_level, cfg.dwt_keep
        def prep(x):
            coeffs = dwt_haar(x, level)
            return coeffs if keep is None else coeffs[:keep]
        return prep, _euclid
    raise BadConfig(f"unknown measure {m!r}")


def _annotate(exc: PlayclustError, where: str) -> PlayclustError:
    try:
        new = type(exc)(f"{where}: {exc}")
    except TypeError:
        new = PlayclustError(f"{where}: {exc}")
    return new


def _rows(cfg: MeasureConfig, features: Sequence, rows: Sequence[int]) -> list[tuple[int, np.ndarray]]:
    _, pair = _kernels(cfg)
    K = len(features)
    out = []
    for i in rows:
        row = np.zeros(K)
        for j in range(i + 1, K):
            try:
                row[j] = pair(features[i], features[j])
            except PlayclustError as exc:
                new = _annotate(exc, f"pair ({i}, {j})")
                new.pair = (i, j)
                raise new from exc
        out.append((i, row))
    return out


def _series_arrays(s) -> tuple[list[np.ndarray], tuple[str, ...] | None]:
    if isinstance(s, SeriesSet):
        return [np.asarray(t.values, dtype=float) for t in s], s.subject_ids
    if isinstance(s, np.ndarray) and s.ndim == 2:
        return [np.asarray(row, dtype=float) for row in s], None
    return [_vec(t) for t in s], None


def pairwise_matrix(
    s,
    cfg: MeasureConfig,
    *,
    representation: Mapping[str, Any] | None = None,
    jobs: int = 1,
) -> DissimilarityMatrix:
    """Dissimilarity matrix of ``cfg.measure`` over every pair in ``s``.

    ``s`` is a :class:`SeriesSet`, a 2-D array (one series per row), or a
    sequence of 1-D arrays.  ``representation`` is copied into the matrix
    provenance.  ``jobs > 1`` spreads rows over worker processes; the result
    does not depend on the worker count.
    """
    arrays, ids = _series_arrays(s)
    K = len(arrays)
    if K < 2:
        raise PlayclustError(f"need at least 2 series, got {K}")
    if cfg.measure != "dtw":
        n0 = arrays[0].size
        for i, a in enumerate(arrays):
            if a.size != n0:
                raise LengthMismatch(f"series {i} has length {a.size}, expected {n0}")
    prep, _ = _kernels(cfg)
    features = []
    for i, a in enumerate(arrays):
        try:
            features.append(prep(a))
        except PlayclustError as exc:
            raise _annotate(exc, f"series {i}") from exc

    D = np.zeros((K, K))
    jobs = max(1, int(jobs))
    if jobs == 1 or K < 64:
        results = _rows(cfg, features, range(K))
    else:
        # interleave rows so the triangular workload is balanced
        blocks = [list(range(w, K, jobs)) for w in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(_rows, [cfg] * jobs, [features] * jobs, blocks)
            results = [r for part in parts for r in part]
    for i, row in results:
        D[i, i + 1:] = row[i + 1:]
    D = D + D.T
    tag = cfg.as_tag()
    tag["representation"] = dict(representation) if representation else {"name": "raw"}
    return DissimilarityMatrix(D, tag, ids)


def default_jobs() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
