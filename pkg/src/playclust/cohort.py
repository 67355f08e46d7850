"""Telemetry ingestion, cohort selection and per-cluster report tables.

Activity CSV (long format, one row per subject and day)::

    subject_id,date,time_played_s,sessions,actions,purchase

Attributes CSV (one row per subject)::

    subject_id,install_date,level_at_start,is_paying_user_at_start,last_activity_date
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import Partition, SeriesSet, TimeSeries, VariableKind, as_date
from .errors import (
    BadConfig,
    DuplicateRecord,
    EmptyCohort,
    MissingAttributes,
    ParseError,
)

log = logging.getLogger(__name__)

ACTIVITY_COLUMNS = ("subject_id", "date", "time_played_s", "sessions", "actions", "purchase")
ATTRIBUTE_COLUMNS = ("subject_id", "install_date", "level_at_start", "is_paying_user_at_start", "last_activity_date")

_VALUE_FIELD = {
    VariableKind.TIME: "time_played",
    VariableKind.SESSIONS: "sessions",
    VariableKind.ACTIONS: "actions",
    VariableKind.PURCHASE: "purchase",
}


@dataclass(frozen=True)
class ActivityRecord:
    subject_id: str
    date: dt.date
    time_played: float = 0.0
    sessions: int = 0
    actions: int = 0
    purchase: float = 0.0


@dataclass(frozen=True)
class SubjectAttributes:
    subject_id: str
    install_date: dt.date
    level_at_start: int
    is_paying_user_at_start: bool
    last_activity_date: dt.date


@dataclass
class TelemetryStore:
    activity: dict[str, dict[dt.date, ActivityRecord]] = field(default_factory=dict)
    attributes: dict[str, SubjectAttributes] = field(default_factory=dict)

    @property
    def subjects(self) -> list[str]:
        return sorted(set(self.activity) | set(self.attributes))

    def record(self, subject_id: str, date) -> ActivityRecord | None:
        return self.activity.get(subject_id, {}).get(as_date(date))

    def __len__(self) -> int:
        return len(self.subjects)


# --- parsing ---------------------------------------------------------------

def _lines(source) -> Iterable[str]:
    if source is None:
        return []
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8").splitlines()
    if isinstance(source, str):
        return source.splitlines()
    return source


def _rows(source, columns: Sequence[str]):
    reader = csv.reader(_lines(source))
    header = None
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        if header is None:
            header = [c.strip() for c in row]
            if tuple(header) != tuple(columns):
                raise ParseError(f"expected header {','.join(columns)}, got {','.join(header)}", reader.line_num)
            continue
        if len(row) != len(columns):
            raise ParseError(f"expected {len(columns)} fields, got {len(row)}", reader.line_num)
        yield reader.line_num, [c.strip() for c in row]


def _date(text: str, line: int, name: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise ParseError(f"{name}: invalid ISO date {text!r}", line) from None


def _number(text: str, line: int, name: str, integer: bool = False):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{name}: invalid number {text!r}", line) from None
    if not np.isfinite(value) or (integer and not value.is_integer()):
        raise ParseError(f"{name}: invalid {'integer' if integer else 'number'} {text!r}", line)
    if value < 0:
        raise ParseError(f"{name}: negative value {text!r}", line)
    return int(value) if integer else value


def ingest(activity_rows, attribute_rows=None) -> TelemetryStore:
    """Parse activity and attribute CSV text into an indexed store.

    Each argument may be a :class:`~pathlib.Path`, a CSV string, or an
    iterable of lines (an open file works).
    """
    store = TelemetryStore()
    for line, (sid, date, t, sess, act, pur) in _rows(activity_rows, ACTIVITY_COLUMNS):
        if not sid:
            raise ParseError("empty subject_id", line)
        rec = ActivityRecord(
            sid,
            _date(date, line, "date"),
            _number(t, line, "time_played_s"),
            _number(sess, line, "sessions", integer=True),
            _number(act, line, "actions", integer=True),
            _number(pur, line, "purchase"),
        )
        days = store.activity.setdefault(sid, {})
        if rec.date in days:
            raise DuplicateRecord(f"line {line}: second record for subject {sid!r} on {rec.date}")
        days[rec.date] = rec

    for line, (sid, inst, level, payer, last) in _rows(attribute_rows, ATTRIBUTE_COLUMNS):
        if sid in store.attributes:
            raise DuplicateRecord(f"line {line}: second attribute row for subject {sid!r}")
        if payer not in ("0", "1"):
            raise ParseError(f"is_paying_user_at_start must be 0 or 1, got {payer!r}", line)
        attrs = SubjectAttributes(
            sid,
            _date(inst, line, "install_date"),
            _number(level, line, "level_at_start", integer=True),
            payer == "1",
            _date(last, line, "last_activity_date"),
        )
        if attrs.install_date > attrs.last_activity_date:
            raise ParseError(f"subject {sid!r}: install_date after last_activity_date", line)
        store.attributes[sid] = attrs
    return store


def load_store(activity_path, attributes_path=None) -> TelemetryStore:
    activity = Path(activity_path)
    if not activity.exists():
        raise FileNotFoundError(f"activity file not found: {activity}")
    attributes = None
    if attributes_path is not None:
        attributes = Path(attributes_path)
        if not attributes.exists():
            raise FileNotFoundError(f"attributes file not found: {attributes}")
        attributes = attributes.read_text(encoding="utf-8").splitlines()
    return ingest(activity.read_text(encoding="utf-8").splitlines(), attributes)


def _fmt(value: float) -> str:
    return repr(float(value)) if not float(value).is_integer() else str(int(value))


def activity_csv(records: Iterable[ActivityRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ACTIVITY_COLUMNS)
    for r in records:
        w.writerow([r.subject_id, r.date.isoformat(), _fmt(r.time_played), r.sessions, r.actions, _fmt(r.purchase)])
    return buf.getvalue()


def attributes_csv(attrs: Iterable[SubjectAttributes]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ATTRIBUTE_COLUMNS)
    for a in attrs:
        w.writerow([
            a.subject_id, a.install_date.isoformat(), a.level_at_start,
            int(a.is_paying_user_at_start), a.last_activity_date.isoformat(),
        ])
    return buf.getvalue()


# --- cohort selection ------------------------------------------------------

@dataclass(frozen=True)
class CohortConfig:
    """Cohort filter and sampling settings; the period ends ``7 * n_weeks - 1`` days after ``p_start``."""

    p_start: dt.date
    n_weeks: int = 3
    variable_kind: VariableKind = VariableKind.TIME
    min_active_days_per_week: int = 6
    require_purchase_in_period: bool = True
    sample_size: int = 1000
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p_start", as_date(self.p_start))
        object.__setattr__(self, "variable_kind", VariableKind(self.variable_kind))
        if self.n_weeks < 1:
            raise BadConfig(f"n_weeks must be positive, got {self.n_weeks}")
        if not 0 <= self.min_active_days_per_week <= 7:
            raise BadConfig(f"min_active_days_per_week must be in [0, 7], got {self.min_active_days_per_week}")
        if self.sample_size < 1:
            raise BadConfig(f"sample_size must be positive, got {self.sample_size}")

    @property
    def length(self) -> int:
        return 7 * self.n_weeks

    @property
    def p_end(self) -> dt.date:
        return self.p_start + dt.timedelta(days=self.length - 1)

    @property
    def days(self) -> list[dt.date]:
        return [self.p_start + dt.timedelta(days=i) for i in range(self.length)]


def _period_values(store: TelemetryStore, sid: str, cfg: CohortConfig, name: str) -> np.ndarray:
    days = store.activity.get(sid, {})
    return np.array([getattr(days[d], name) if d in days else 0.0 for d in cfg.days], dtype=float)


def qualifying_subjects(store: TelemetryStore, cfg: CohortConfig) -> list[str]:
    """Subjects passing every cohort filter, sorted by id (before sampling)."""
    out = []
    for sid in sorted(store.attributes):
        attrs = store.attributes[sid]
        if not attrs.install_date < cfg.p_start:
            continue
        if not attrs.last_activity_date > cfg.p_end:
            continue
        if cfg.variable_kind is VariableKind.PURCHASE:
            if cfg.require_purchase_in_period and not _period_values(store, sid, cfg, "purchase").sum() > 0:
                continue
        elif cfg.min_active_days_per_week > 0:
            active = _period_values(store, sid, cfg, "time_played") > 0
            per_week = active.reshape(cfg.n_weeks, 7).sum(axis=1)
            if np.any(per_week < cfg.min_active_days_per_week):
                continue
        out.append(sid)
    return out


def sample_subjects(subjects: Sequence[str], size: int, seed: int) -> list[str]:
    """Uniform sample without replacement; keeps the input order of the survivors."""
    if len(subjects) <= size:
        return list(subjects)
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(len(subjects), size=size, replace=False))
    return [subjects[i] for i in chosen]


def build_cohort(store: TelemetryStore, cfg: CohortConfig, event_boundaries=None) -> SeriesSet:
    """Filter, sample and extract one daily series per qualifying subject."""
    missing = sorted(set(store.activity) - set(store.attributes))
    if missing:
        log.info("%d subjects without attributes are skipped", len(missing))
    chosen = sample_subjects(qualifying_subjects(store, cfg), cfg.sample_size, cfg.rng_seed)
    if not chosen:
        raise EmptyCohort(
            f"no subject qualifies for a {cfg.variable_kind.value} cohort over {cfg.p_start}..{cfg.p_end}"
        )
    name = _VALUE_FIELD[cfg.variable_kind]
    series = tuple(
        TimeSeries(sid, cfg.p_start, _period_values(store, sid, cfg, name), cfg.variable_kind)
        for sid in chosen
    )
    return SeriesSet(series, event_boundaries)


# --- report tables ---------------------------------------------------------

def _attrs_map(attrs) -> Mapping[str, SubjectAttributes]:
    if isinstance(attrs, TelemetryStore):
        return attrs.attributes
    if isinstance(attrs, Mapping):
        return attrs
    return {a.subject_id: a for a in attrs}


def _member_ids(p: Partition, subject_ids) -> tuple[str, ...]:
    ids = subject_ids if subject_ids is not None else p.subject_ids
    if ids is None:
        raise BadConfig("partition carries no subject ids; pass subject_ids")
    return tuple(ids)


@dataclass(frozen=True)
class ClusterCharacteristics:
    cluster: int
    n_members: int
    paying_ratio: float
    mean_level: float


def characteristics_table(p: Partition, attrs, subject_ids=None) -> list[ClusterCharacteristics]:
    """Per-cluster size, share of paying users and mean level at period start."""
    attrs = _attrs_map(attrs)
    ids = _member_ids(p, subject_ids)
    missing = [s for s in ids if s not in attrs]
    if missing:
        raise MissingAttributes(missing)
    rows = []
    for c in range(1, p.k + 1):
        members = [attrs[ids[i]] for i in p.members(c)]
        rows.append(ClusterCharacteristics(
            c,
            len(members),
            sum(a.is_paying_user_at_start for a in members) / len(members),
            float(np.mean([a.level_at_start for a in members])),
        ))
    return rows


@dataclass(frozen=True)
class ChurnConfig:
    checkpoints: tuple[dt.date, ...]
    inactivity_window_days: int = 30

    def __post_init__(self):
        cps = tuple(as_date(c) for c in self.checkpoints)
        if not cps:
            raise BadConfig("at least one churn checkpoint is required")
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise BadConfig("churn checkpoints must be strictly increasing")
        if self.inactivity_window_days < 1:
            raise BadConfig("inactivity window must be positive")
        object.__setattr__(self, "checkpoints", cps)

    def validate_against(self, p_end) -> None:
        p_end = as_date(p_end)
        if self.checkpoints[0] <= p_end:
            raise BadConfig(f"churn checkpoints must fall after the period end {p_end}")


@dataclass(frozen=True)
class ChurnTable:
    checkpoints: tuple[dt.date, ...]
    ratios: np.ndarray  # checkpoints x clusters
    sizes: tuple[int, ...]

    def ratio(self, checkpoint_index: int, cluster: int) -> float:
        return float(self.ratios[checkpoint_index, cluster - 1])


def is_churned(attrs: SubjectAttributes, checkpoint: dt.date, window_days: int) -> bool:
    """No recorded activity within the ``window_days`` days before ``checkpoint``."""
    return attrs.last_activity_date < checkpoint - dt.timedelta(days=window_days)


def churn_table(p: Partition, attrs, cfg: ChurnConfig, subject_ids=None) -> ChurnTable:
    """Cumulative churned share of each cluster at every checkpoint."""
    attrs = _attrs_map(attrs)
    ids = _member_ids(p, subject_ids)
    missing = [s for s in ids if s not in attrs]
    if missing:
        raise MissingAttributes(missing)
    ratios = np.zeros((len(cfg.checkpoints), p.k))
    for c in range(1, p.k + 1):
        members = [attrs[ids[i]] for i in p.members(c)]
        for t, checkpoint in enumerate(cfg.checkpoints):
            churned = sum(is_churned(a, checkpoint, cfg.inactivity_window_days) for a in members)
            ratios[t, c - 1] = churned / len(members)
    return ChurnTable(cfg.checkpoints, ratios, tuple(int(n) for n in p.sizes))


# --- table rendering -------------------------------------------------------

def characteristics_csv(rows: Sequence[ClusterCharacteristics]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cluster", "n_members", "paying_ratio", "mean_level"])
    for r in rows:
        w.writerow([r.cluster, r.n_members, f"{r.paying_ratio:.6f}", f"{r.mean_level:.6f}"])
    return buf.getvalue()


def churn_csv(table: ChurnTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    k = table.ratios.shape[1]
    w.writerow(["checkpoint"] + [f"cluster_{c}" for c in range(1, k + 1)])
    for t, cp in enumerate(table.checkpoints):
        w.writerow([cp.isoformat()] + [f"{v:.6f}" for v in table.ratios[t]])
    return buf.getvalue()


def _aligned(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).rjust(wd) for x, wd in zip(line, widths)) for line in [header, *rows]]
    lines.insert(1, "  ".join("-" * wd for wd in widths))
    return "\n".join(lines) + "\n"


def characteristics_text(rows: Sequence[ClusterCharacteristics]) -> str:
    header = ["variable"] + [f"class {r.cluster}" for r in rows]
    body = [
        ["number of players"] + [str(r.n_members) for r in rows],
        ["ratio PU"] + [f"{100 * r.paying_ratio:.1f}%" for r in rows],
        ["average level"] + [f"{r.mean_level:.0f}" for r in rows],
    ]
    return _aligned(header, body)


def churn_text(table: ChurnTable) -> str:
    k = table.ratios.shape[1]
    header = ["churners ratio"] + [f"class {c}" for c in range(1, k + 1)]
    body = [
        [cp.isoformat()] + [f"{100 * v:.1f}%" for v in table.ratios[t]]
        for t, cp in enumerate(table.checkpoints)
    ]
    return _aligned(header, body)
