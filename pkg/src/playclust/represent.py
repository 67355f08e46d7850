"""Representation transforms applied before distances are computed.

PAA/SAX reduce a series to segment means and then to symbols, the Haar DWT
rewrites it in an orthonormal wavelet basis, and the moving-average trend
keeps only the slow component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Mapping

import numpy as np
from scipy.stats import norm

from .errors import (
    BadConfig,
    BadLength,
    ConfigMismatch,
    LengthMismatch,
    NonDivisibleLength,
    NotNormalized,
    TooShort,
)

NORMALIZED_TOL = 1e-6


@dataclass(frozen=True)
class SaxConfig:
    w: int = 7
    alpha: int = 3

    def __post_init__(self):
        if int(self.w) < 1:
            raise BadConfig(f"SAX word size must be positive, got {self.w}")
        if not 2 <= int(self.alpha) <= 20:
            raise BadConfig(f"SAX alphabet size must be in [2, 20], got {self.alpha}")


@dataclass(frozen=True)
class TrendConfig:
    window: int = 7

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise BadConfig(f"trend window must be odd and >= 3, got {self.window}")


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=float).ravel()


# --- PAA / SAX -------------------------------------------------------------

def paa(x, w: int) -> np.ndarray:
    """Piecewise aggregate approximation: means of ``w`` equal blocks."""
    x = _vec(x)
    if w < 1 or x.size % w != 0:
        raise NonDivisibleLength(f"PAA needs w to divide the length: N={x.size}, w={w}")
    return x.reshape(w, -1).mean(axis=1)


def paa_expand(segments, n: int) -> np.ndarray:
    """Repeat each PAA segment mean over its block to get back length ``n``."""
    segments = _vec(segments)
    if n % segments.size != 0:
        raise NonDivisibleLength(f"cannot expand {segments.size} segments to length {n}")
    return np.repeat(segments, n // segments.size)


@lru_cache(maxsize=None)
def _breakpoints(alpha: int) -> tuple[float, ...]:
    return tuple(float(b) for b in norm.ppf(np.arange(1, alpha) / alpha))


def breakpoints(alpha: int) -> np.ndarray:
    """The ``alpha - 1`` standard-normal quantiles splitting N(0, 1) into equal-mass zones."""
    if not 2 <= alpha <= 20:
        raise BadConfig(f"alphabet size must be in [2, 20], got {alpha}")
    return np.array(_breakpoints(int(alpha)))


def sax_symbols(x, cfg: SaxConfig) -> str:
    """SAX word of a z-normalized series, letters ``a``, ``b``, ... low to high."""
    x = _vec(x)
    if x.size < 2:
        raise TooShort("SAX needs at least 2 values")
    mean, sd = x.mean(), x.std(ddof=1)
    if abs(mean) > NORMALIZED_TOL or abs(sd - 1.0) > NORMALIZED_TOL:
        raise NotNormalized(f"series is not z-normalized (mean={mean:.3g}, sd={sd:.3g})")
    if cfg.w > x.size:
        raise NonDivisibleLength(f"word size {cfg.w} exceeds series length {x.size}")
    segments = paa(x, cfg.w)
    idx = np.searchsorted(breakpoints(cfg.alpha), segments, side="right")
    return "".join(chr(ord("a") + int(i)) for i in idx)


def _symbol_index(c: str, alpha: int) -> int:
    i = ord(c) - ord("a")
    if not 0 <= i < alpha:
        raise ConfigMismatch(f"symbol {c!r} is outside an alphabet of size {alpha}")
    return i


def symbol_distance(r: int, c: int, alpha: int) -> float:
    """MINDIST lookup cell for 0-based symbol indices."""
    if abs(r - c) <= 1:
        return 0.0
    beta = _breakpoints(alpha)
    return beta[max(r, c) - 1] - beta[min(r, c)]


def sax_mindist(a: str, b: str, n_original: int, cfg: SaxConfig) -> float:
    """Lower-bounding distance between two SAX words of the same configuration."""
    if len(a) != len(b):
        raise LengthMismatch(f"SAX words differ in length: {len(a)} vs {len(b)}")
    if len(a) != cfg.w:
        raise ConfigMismatch(f"word length {len(a)} does not match w={cfg.w}")
    total = 0.0
    for ca, cb in zip(a, b):
        cell = symbol_distance(_symbol_index(ca, cfg.alpha), _symbol_index(cb, cfg.alpha), cfg.alpha)
        total += cell * cell
    return math.sqrt(n_original / cfg.w) * math.sqrt(total)


# --- Haar DWT --------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)


def dwt_haar(x, level: int = 1) -> np.ndarray:
    """Orthonormal Haar coefficients: final approximation, then details coarse to fine."""
    x = _vec(x)
    if level < 1:
        raise BadLength(f"level must be >= 1, got {level}")
    if x.size == 0 or x.size % (2 ** level) != 0:
        raise BadLength(f"length {x.size} is not a multiple of 2**{level}")
    approx = x
    details = []
    for _ in range(level):
        even, odd = approx[0::2], approx[1::2]
        details.append((even - odd) / _SQRT2)
        approx = (even + odd) / _SQRT2
    return np.concatenate([approx] + details[::-1])


def idwt_haar(coeffs, level: int = 1) -> np.ndarray:
    coeffs = _vec(coeffs)
    if level < 1 or coeffs.size % (2 ** level) != 0:
        raise BadLength(f"length {coeffs.size} is not a multiple of 2**{level}")
    n = coeffs.size // (2 ** level)
    approx = coeffs[:n]
    pos = n
    for _ in range(level):
        detail = coeffs[pos:pos + approx.size]
        pos += approx.size
        out = np.empty(2 * approx.size)
        out[0::2] = (approx + detail) / _SQRT2
        out[1::2] = (approx - detail) / _SQRT2
        approx = out
    return approx


def dwt_dissim(x, y, level: int = 1, keep: int | None = None) -> float:
    """Euclidean distance between the leading ``keep`` Haar coefficients."""
    x, y = _vec(x), _vec(y)
    if x.size != y.size:
        raise BadLength(f"series lengths differ: {x.size} vs {y.size}")
    keep = x.size if keep is None else int(keep)
    if not 0 <= keep <= x.size:
        raise BadLength(f"keep must be in [0, {x.size}], got {keep}")
    cx, cy = dwt_haar(x, level)[:keep], dwt_haar(y, level)[:keep]
    return math.sqrt(float(np.dot(cx - cy, cx - cy)))


# --- trend -----------------------------------------------------------------

def extract_trend(x, cfg: TrendConfig | int = TrendConfig()) -> np.ndarray:
    """Centered moving average; edge windows shrink to the points available.

    The first point averages ``x[0 : h + 1]`` where ``h = window // 2``, so the
    output keeps the input length.
    """
    window = cfg.window if isinstance(cfg, TrendConfig) else TrendConfig(int(cfg)).window
    x = _vec(x)
    if x.size < window:
        raise TooShort(f"series of length {x.size} is shorter than the trend window {window}")
    h = window // 2
    out = np.empty_like(x)
    for i in range(x.size):
        out[i] = x[max(0, i - h):i + h + 1].mean()
    return out


# --- named representations -------------------------------------------------

REPRESENTATIONS = ("raw", "trend", "znorm", "paa")


def apply_representation(series_set, representation: Mapping[str, Any] | None):
    """Transform every member of a SeriesSet by a named representation.

    ``representation`` is a mapping such as ``{"name": "trend", "window": 7}``.
    SAX and DWT are measures over raw series, not representations here.
    """
    from .core import znormalize

    rep = dict(representation or {"name": "raw"})
    name = rep.get("name", "raw")
    if name == "raw":
        return series_set
    if name == "trend":
        cfg = TrendConfig(int(rep.get("window", 7)))
        return series_set.map(lambda v: extract_trend(v, cfg))
    if name == "znorm":
        return series_set.map(znormalize)
    if name == "paa":
        w = int(rep["w"])
        return series_set.map(lambda v: paa(v, w))
    raise BadConfig(f"unknown representation {name!r}; expected one of {', '.join(REPRESENTATIONS)}")
