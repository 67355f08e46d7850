"""Domain types shared across the package.

All types are immutable once built: arrays are copied and flagged read-only,
so instances can be shared freely between workers.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import enum
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    BadK,
    ConstantSeries,
    InvalidMatrix,
    InvalidSeries,
    LengthMismatch,
)

HEIGHT_RTOL = 1e-9


class VariableKind(str, enum.Enum):
    TIME = "time"
    SESSIONS = "sessions"
    ACTIONS = "actions"
    PURCHASE = "purchase"


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def as_date(value) -> dt.date:
    if isinstance(value, dt.datetime):
        return value.date()
    if isinstance(value, dt.date):
        return value
    return dt.date.fromisoformat(str(value))


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """One subject's daily observations over the studied period.

    ``derived`` marks series produced by a transform (z-normalization,
    smoothing) whose values may legitimately be negative; raw observations
    must be non-negative.
    """

    subject_id: str
    start_date: dt.date
    values: np.ndarray
    variable_kind: VariableKind = VariableKind.TIME
    derived: bool = False

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 1:
            raise InvalidSeries(f"series {self.subject_id!r}: values must be 1-D")
        if values.size < 2:
            raise InvalidSeries(f"series {self.subject_id!r}: need at least 2 values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise InvalidSeries(f"series {self.subject_id!r}: non-finite values")
        if not self.derived and np.any(values < 0):
            raise InvalidSeries(f"series {self.subject_id!r}: negative observations")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "start_date", as_date(self.start_date))
        object.__setattr__(self, "variable_kind", VariableKind(self.variable_kind))
        object.__setattr__(self, "subject_id", str(self.subject_id))

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def length(self) -> int:
        return self.values.size

    def with_values(self, values, derived: bool = True) -> "TimeSeries":
        return dataclasses.replace(self, values=values, derived=derived)


@dataclass(frozen=True, eq=False)
class SeriesSet:
    """Aligned collection of series sharing start date, length and variable."""

    series: tuple[TimeSeries, ...]
    event_boundaries: tuple[int, ...] | None = None

    def __post_init__(self):
        series = tuple(self.series)
        if not series:
            raise InvalidSeries("a SeriesSet needs at least one series")
        first = series[0]
        for s in series[1:]:
            if s.start_date != first.start_date:
                raise InvalidSeries(f"series {s.subject_id!r} starts {s.start_date}, expected {first.start_date}")
            if s.length != first.length:
                raise LengthMismatch(f"series {s.subject_id!r} has length {s.length}, expected {first.length}")
            if s.variable_kind != first.variable_kind:
                raise InvalidSeries(f"series {s.subject_id!r} has kind {s.variable_kind.value}")
        bounds = self.event_boundaries
        if bounds is None:
            bounds = tuple(range(0, first.length + 1, 7))
        bounds = tuple(int(b) for b in bounds)
        if any(b < 0 or b > first.length for b in bounds):
            raise InvalidSeries(f"event boundaries {bounds} outside [0, {first.length}]")
        if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise InvalidSeries(f"event boundaries {bounds} not strictly increasing")
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "event_boundaries", bounds)

    @classmethod
    def from_array(
        cls,
        values,
        subject_ids: Sequence[str] | None = None,
        start_date="2015-01-01",
        variable_kind=VariableKind.TIME,
        event_boundaries=None,
        derived: bool = False,
    ) -> "SeriesSet":
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise InvalidSeries("expected a 2-D array (series x days)")
        if subject_ids is None:
            width = len(str(values.shape[0] - 1))
            subject_ids = [f"s{i:0{width}d}" for i in range(values.shape[0])]
        members = tuple(
            TimeSeries(sid, start_date, row, variable_kind, derived=derived)
            for sid, row in zip(subject_ids, values)
        )
        return cls(members, event_boundaries)

    def __len__(self) -> int:
        return len(self.series)

    def __iter__(self) -> Iterator[TimeSeries]:
        return iter(self.series)

    def __getitem__(self, i) -> TimeSeries:
        return self.series[i]

    @property
    def start_date(self) -> dt.date:
        return self.series[0].start_date

    @property
    def length(self) -> int:
        return self.series[0].length

    @property
    def variable_kind(self) -> VariableKind:
        return self.series[0].variable_kind

    @property
    def subject_ids(self) -> tuple[str, ...]:
        return tuple(s.subject_id for s in self.series)

    @property
    def values(self) -> np.ndarray:
        return np.vstack([s.values for s in self.series])

    def map(self, func) -> "SeriesSet":
        """Apply a values -> values transform to every member.

        Event boundaries are day offsets, so they are kept only when the
        transform preserves the length.
        """
        series = tuple(s.with_values(func(s.values)) for s in self.series)
        same_length = series[0].length == self.length
        return SeriesSet(series, self.event_boundaries if same_length else None)

    def subset(self, indices) -> "SeriesSet":
        return SeriesSet(tuple(self.series[i] for i in indices), self.event_boundaries)


@dataclass(frozen=True, eq=False)
class DissimilarityMatrix:
    entries: np.ndarray
    measure_tag: Mapping[str, Any] = field(default_factory=dict)
    subject_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        d = _frozen_array(self.entries)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InvalidMatrix(f"dissimilarity matrix must be square, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise InvalidMatrix("dissimilarity matrix has non-finite entries")
        if np.any(d < 0):
            raise InvalidMatrix("dissimilarity matrix has negative entries")
        if np.any(np.diag(d) != 0):
            raise InvalidMatrix("dissimilarity matrix has a non-zero diagonal")
        if not np.array_equal(d, d.T):
            raise InvalidMatrix("dissimilarity matrix is not symmetric")
        ids = self.subject_ids
        if ids is not None:
            ids = tuple(str(i) for i in ids)
            if len(ids) != d.shape[0]:
                raise InvalidMatrix(f"{len(ids)} subject ids for a {d.shape[0]}x{d.shape[0]} matrix")
        object.__setattr__(self, "entries", d)
        object.__setattr__(self, "measure_tag", dict(self.measure_tag))
        object.__setattr__(self, "subject_ids", ids)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def upper_triangle(self) -> np.ndarray:
        return self.entries[np.triu_indices(self.size, k=1)]


class Merge(NamedTuple):
    """One agglomeration step.

    Nodes use signed numbering: leaf ``i`` (0-based) is ``-(i + 1)`` and the
    cluster created by merge ``m`` (1-based) is ``m``.
    """

    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True, eq=False)
class Dendrogram:
    merges: tuple[Merge, ...]
    leaf_count: int

    def __post_init__(self):
        merges = tuple(Merge(int(a), int(b), float(h), int(n)) for a, b, h, n in self.merges)
        K = int(self.leaf_count)
        if K < 1:
            raise InvalidMatrix("dendrogram needs at least one leaf")
        if len(merges) != K - 1:
            raise InvalidMatrix(f"expected {K - 1} merges for {K} leaves, got {len(merges)}")
        seen = set()
        sizes = {}
        for m, (a, b, h, n) in enumerate(merges, start=1):
            for node in (a, b):
                if node < 0 and not -K <= node <= -1:
                    raise InvalidMatrix(f"merge {m}: leaf {node} out of range")
                if node > 0 and node >= m:
                    raise InvalidMatrix(f"merge {m}: refers to future node {node}")
                if node == 0:
                    raise InvalidMatrix(f"merge {m}: node 0 is not valid")
                if node in seen:
                    raise InvalidMatrix(f"merge {m}: node {node} merged twice")
                seen.add(node)
            expected = sizes.get(a, 1) + sizes.get(b, 1)
            if n != expected:
                raise InvalidMatrix(f"merge {m}: size {n}, expected {expected}")
            sizes[m] = n
            if not np.isfinite(h) or h < 0:
                raise InvalidMatrix(f"merge {m}: invalid height {h}")
        heights = [mg.height for mg in merges]
        for m in range(1, len(heights)):
            if heights[m] < heights[m - 1] - HEIGHT_RTOL * max(1.0, abs(heights[m - 1])):
                raise InvalidMatrix(f"merge heights decrease at merge {m + 1}: {heights[m - 1]} -> {heights[m]}")
        object.__setattr__(self, "merges", merges)
        object.__setattr__(self, "leaf_count", K)

    @property
    def heights(self) -> np.ndarray:
        return np.array([m.height for m in self.merges], dtype=float)

    def leaves_under(self, node: int) -> list[int]:
        """0-based leaf indices below ``node``, in left-to-right drawing order."""
        out = []
        stack = [node]
        while stack:
            n = stack.pop()
            if n < 0:
                out.append(-n - 1)
            else:
                merge = self.merges[n - 1]
                stack.append(merge.right)
                stack.append(merge.left)
        return out

    def leaf_order(self) -> list[int]:
        if self.leaf_count == 1:
            return [0]
        return self.leaves_under(len(self.merges))


@dataclass(frozen=True, eq=False)
class Partition:
    labels: np.ndarray
    k: int
    subject_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        labels = _frozen_array(self.labels, dtype=np.int64)
        k = int(self.k)
        if labels.ndim != 1 or labels.size == 0:
            raise BadK("partition labels must be a non-empty 1-D sequence")
        if k < 1 or np.any(labels < 1) or np.any(labels > k):
            raise BadK(f"labels must lie in 1..{k}")
        counts = np.bincount(labels, minlength=k + 1)[1:]
        if np.any(counts == 0):
            empty = [i + 1 for i in np.flatnonzero(counts == 0)]
            raise BadK(f"empty clusters: {empty}")
        ids = self.subject_ids
        if ids is not None:
            ids = tuple(str(i) for i in ids)
            if len(ids) != labels.size:
                raise BadK(f"{len(ids)} subject ids for {labels.size} labels")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "subject_ids", ids)

    @classmethod
    def from_labels(cls, labels, subject_ids=None) -> "Partition":
        """Relabel arbitrary hashable labels to 1..k by first appearance."""
        mapping: dict = {}
        out = []
        for lab in labels:
            if lab not in mapping:
                mapping[lab] = len(mapping) + 1
            out.append(mapping[lab])
        return cls(np.array(out), len(mapping), subject_ids)

    def __len__(self) -> int:
        return self.labels.size

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k + 1)[1:]

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)


def znormalize(x: TimeSeries) -> TimeSeries:
    """Rescale a series to zero mean and unit sample standard deviation."""
    values = np.asarray(x, dtype=float)
    if values.size < 2:
        raise InvalidSeries("z-normalization needs at least 2 values")
    if np.all(values == values[0]):
        raise ConstantSeries("cannot z-normalize a constant series")
    z = (values - values.mean()) / values.std(ddof=1)
    if isinstance(x, TimeSeries):
        return x.with_values(z)
    return z
