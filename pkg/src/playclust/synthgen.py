"""Seeded synthetic benchmarks with known cluster structure.

Shape benchmarks scale a piecewise-linear template per cluster, optionally
delay it by a few days, and add Gaussian noise.  Sparse benchmarks emit
zero-inflated purchase-like series whose clusters differ in how often and
how much is spent.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .cohort import ActivityRecord, SubjectAttributes, activity_csv, attributes_csv
from .core import Partition, SeriesSet, TimeSeries, VariableKind, as_date
from .errors import BadSpec


@dataclass(frozen=True)
class Archetype:
    """Piecewise-linear template through ``knots`` spaced evenly over the series.

    With as many knots as days the template is an arbitrary daily profile.
    """

    knots: tuple[float, ...]
    name: str = ""

    def template(self, length: int) -> np.ndarray:
        knots = np.asarray(self.knots, dtype=float)
        if knots.size == 1:
            return np.full(length, knots[0])
        return np.interp(np.arange(length), np.linspace(0, length - 1, knots.size), knots)


@dataclass(frozen=True)
class SparseRegime:
    """Purchase regime: daily purchase probability, magnitude range, guaranteed minimum of purchases."""

    rate: float
    magnitude: tuple[float, float] = (1.0, 1.0)
    min_events: int = 0
    name: str = ""


@dataclass(frozen=True)
class BenchmarkSpec:
    """Benchmark definition.

    ``noise_sd`` is relative to each series' amplitude, so ``0.1`` means a
    noise standard deviation of one tenth of the drawn amplitude.
    ``sparsity`` is the probability that a purchase is dropped.
    """

    archetypes: tuple[Union[Archetype, SparseRegime], ...]
    n_per_cluster: int = 25
    length: int = 21
    noise_sd: float = 0.1
    phase_shift_days: int = 0
    amplitude_range: tuple[float, float] = (0.5, 2.0)
    sparsity: float = 0.0
    rng_seed: int = 0
    start_date: dt.date = field(default=dt.date(2015, 6, 11))

    def __post_init__(self):
        object.__setattr__(self, "archetypes", tuple(self.archetypes))
        object.__setattr__(self, "start_date", as_date(self.start_date))
        if len(self.archetypes) < 2:
            raise BadSpec("a benchmark needs at least 2 archetypes")
        if self.n_per_cluster < 1:
            raise BadSpec("n_per_cluster must be positive")
        if self.length < 7:
            raise BadSpec("length must be at least 7")
        if self.noise_sd < 0:
            raise BadSpec("noise_sd must be non-negative")
        if not 0 <= self.phase_shift_days < self.length:
            raise BadSpec("phase_shift_days must be in [0, length)")
        lo, hi = self.amplitude_range
        if not 0 < lo <= hi:
            raise BadSpec(f"invalid amplitude range {self.amplitude_range}")
        if not 0 <= self.sparsity <= 1:
            raise BadSpec("sparsity must be a probability")


def _ids(n: int) -> list[str]:
    width = max(4, len(str(n - 1)))
    return [f"u{i:0{width}d}" for i in range(n)]


def _assemble(values: np.ndarray, truth: np.ndarray, spec: BenchmarkSpec, rng, kind) -> tuple[SeriesSet, Partition]:
    order = rng.permutation(values.shape[0])
    values, truth = values[order], truth[order]
    ids = _ids(values.shape[0])
    series = tuple(TimeSeries(sid, spec.start_date, row, kind) for sid, row in zip(ids, values))
    return SeriesSet(series), Partition(truth, len(spec.archetypes), tuple(ids))


def shift_right(x: np.ndarray, days: int) -> np.ndarray:
    """Delay a series by ``days``, repeating the first value at the start."""
    if days == 0:
        return x.copy()
    return np.concatenate([np.full(days, x[0]), x[:-days]])


def generate_shape_benchmark(spec: BenchmarkSpec) -> tuple[SeriesSet, Partition]:
    if not all(isinstance(a, Archetype) for a in spec.archetypes):
        raise BadSpec("shape benchmarks need Archetype templates")
    rng = np.random.default_rng(spec.rng_seed)
    rows, truth = [], []
    for c, arch in enumerate(spec.archetypes, start=1):
        template = arch.template(spec.length)
        if np.any(template < 0):
            raise BadSpec(f"archetype {arch.name or c} has negative values")
        for _ in range(spec.n_per_cluster):
            amp = rng.uniform(*spec.amplitude_range)
            shift = int(rng.integers(0, spec.phase_shift_days + 1))
            noise = rng.normal(0.0, spec.noise_sd * amp, spec.length) if spec.noise_sd > 0 else 0.0
            rows.append(np.maximum(amp * shift_right(template, shift) + noise, 0.0))
            truth.append(c)
    return _assemble(np.array(rows), np.array(truth), spec, rng, VariableKind.TIME)


def generate_sparse_benchmark(spec: BenchmarkSpec) -> tuple[SeriesSet, Partition]:
    """Purchase-like series; ``sparsity = 1`` drops every purchase."""
    if not all(isinstance(a, SparseRegime) for a in spec.archetypes):
        raise BadSpec("sparse benchmarks need SparseRegime descriptors")
    rng = np.random.default_rng(spec.rng_seed)
    keep = 1.0 - spec.sparsity
    rows, truth = [], []
    for c, regime in enumerate(spec.archetypes, start=1):
        if not 0 <= regime.rate <= 1 or regime.min_events > spec.length:
            raise BadSpec(f"invalid regime {regime}")
        lo, hi = regime.magnitude
        for _ in range(spec.n_per_cluster):
            days = (rng.random(spec.length) < regime.rate) & (rng.random(spec.length) < keep)
            short = regime.min_events - int(days.sum())
            if short > 0 and keep > 0:
                days[rng.choice(np.flatnonzero(~days), size=short, replace=False)] = True
            row = np.where(days, rng.uniform(lo, hi, spec.length), 0.0)
            rows.append(row)
            truth.append(c)
    return _assemble(np.array(rows), np.array(truth), spec, rng, VariableKind.PURCHASE)


# --- stock benchmarks ------------------------------------------------------

EVENT_ARCHETYPES = (
    Archetype((1.0, 1.5, 2.5, 3.0), "rise"),
    Archetype((3.0, 2.5, 1.5, 1.0), "decline"),
    Archetype((2.0, 2.5, 1.0, 3.0), "plunge-B-spike-C"),
    Archetype((2.0, 1.5, 3.0, 1.0), "spike-B-plunge-C"),
)


def _daily(spikes: dict[int, float], base: float = 1.0, length: int = 21) -> tuple[float, ...]:
    out = [base] * length
    for day, height in spikes.items():
        out[day] = height
    return tuple(out)


SPIKE_ARCHETYPES = (
    Archetype(_daily({9: 6.0}), "single-spike"),
    Archetype(_daily({5: 6.0, 13: 6.0}), "double-spike"),
    Archetype(_daily({4: 6.0, 10: 6.0, 16: 6.0}), "triple-spike"),
)

# complexity estimates land roughly 3x apart: ~5, ~55 and ~16
PURCHASE_REGIMES = (
    SparseRegime(0.95, (1.0, 2.0), 1, "daily-small"),
    SparseRegime(0.15, (18.0, 22.0), 4, "rare-spike"),
    SparseRegime(0.0, (10.0, 12.0), 1, "flat-plus-one"),
)


def shape_benchmark_spec(seed: int = 0, **overrides) -> BenchmarkSpec:
    params = dict(archetypes=EVENT_ARCHETYPES, n_per_cluster=25, noise_sd=0.1, amplitude_range=(0.5, 2.0))
    params.update(overrides)
    return BenchmarkSpec(rng_seed=seed, **params)


def phase_benchmark_spec(seed: int = 0, **overrides) -> BenchmarkSpec:
    params = dict(
        archetypes=SPIKE_ARCHETYPES, n_per_cluster=20, noise_sd=0.05,
        phase_shift_days=2, amplitude_range=(1.0, 1.0),
    )
    params.update(overrides)
    return BenchmarkSpec(rng_seed=seed, **params)


def sparse_benchmark_spec(seed: int = 0, **overrides) -> BenchmarkSpec:
    params = dict(archetypes=PURCHASE_REGIMES, n_per_cluster=25, sparsity=0.2)
    params.update(overrides)
    return BenchmarkSpec(rng_seed=seed, **params)


# --- serialization ---------------------------------------------------------

def benchmark_records(series: SeriesSet, seed: int = 0) -> tuple[list[ActivityRecord], list[SubjectAttributes]]:
    """Activity rows and subject attributes that let a benchmark pass the cohort filters.

    Every subject installs before the period and stays active after it; the
    other activity columns get plausible filler values.
    """
    rng = np.random.default_rng(seed)
    start = series.start_date
    end = start + dt.timedelta(days=series.length - 1)
    purchase = series.variable_kind is VariableKind.PURCHASE
    records, attrs = [], []
    for s in series:
        for day, v in enumerate(s.values):
            date = start + dt.timedelta(days=day)
            if purchase:
                records.append(ActivityRecord(s.subject_id, date, 1800.0, 1, 20, float(v)))
            else:
                records.append(ActivityRecord(s.subject_id, date, float(v), int(v > 0), 0, 0.0))
        attrs.append(SubjectAttributes(
            s.subject_id,
            start - dt.timedelta(days=int(rng.integers(1, 365))),
            int(rng.integers(1, 100)),
            bool(rng.random() < 0.3) or purchase,
            end + dt.timedelta(days=int(rng.integers(1, 200))),
        ))
    return records, attrs


def benchmark_csv(series: SeriesSet, seed: int = 0) -> tuple[str, str]:
    records, attrs = benchmark_records(series, seed)
    return activity_csv(records), attributes_csv(attrs)


def truth_csv(truth: Partition) -> str:
    lines = ["subject_id,cluster"]
    lines += [f"{sid},{lab}" for sid, lab in zip(truth.subject_ids, truth.labels)]
    return "\n".join(lines) + "\n"


def benchmark_kinds() -> Sequence[str]:
    return ("shape", "phase", "sparse")


def make_benchmark(kind: str, seed: int = 0, **overrides) -> tuple[SeriesSet, Partition]:
    if kind == "shape":
        return generate_shape_benchmark(shape_benchmark_spec(seed, **overrides))
    if kind == "phase":
        return generate_shape_benchmark(phase_benchmark_spec(seed, **overrides))
    if kind == "sparse":
        return generate_sparse_benchmark(sparse_benchmark_spec(seed, **overrides))
    raise BadSpec(f"unknown benchmark kind {kind!r}; expected one of {', '.join(benchmark_kinds())}")
