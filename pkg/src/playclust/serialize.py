"""Plain-text formats for intermediate artifacts.

* series CSV: ``subject_id,start_date,variable_kind,day_0,...,day_{N-1}``
* dissimilarity matrix: provenance header, id line, size, then the strict
  lower triangle one row per line
* merge list: a provenance comment (Ward convention, matrix tag), then
  ``merge_index left right height size`` per line, leaves numbered
  ``-1..-K`` and merges ``1..K-1``
* labels CSV: ``subject_id,cluster``
* config: ``key = value`` lines, ``#`` starts a comment

Floats are written with ``repr`` so every file round-trips exactly.
"""

from __future__ import annotations

import csv
import io
from typing import Any, Mapping

import numpy as np

from .core import Dendrogram, DissimilarityMatrix, Merge, Partition, SeriesSet, TimeSeries
from .errors import ParseError
from .hcluster import WARD_CONVENTION

MATRIX_MAGIC = "# playclust-dissimilarity"
MERGES_MAGIC = "# playclust-merges"


def _num(value: float) -> str:
    return repr(float(value))


def _parse_scalar(text: str) -> Any:
    if text == "None":
        return None
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


# --- series ----------------------------------------------------------------

def series_csv(series: SeriesSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["subject_id", "start_date", "variable_kind"] + [f"day_{i}" for i in range(series.length)])
    for s in series:
        w.writerow([s.subject_id, s.start_date.isoformat(), s.variable_kind.value] + [_num(v) for v in s.values])
    return buf.getvalue()


def read_series_csv(text: str, event_boundaries=None) -> SeriesSet:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or header[:3] != ["subject_id", "start_date", "variable_kind"]:
        raise ParseError("series CSV must start with subject_id,start_date,variable_kind", 1)
    members = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", reader.line_num)
        try:
            values = [float(v) for v in row[3:]]
            members.append(TimeSeries(row[0], row[1], values, row[2], derived=any(v < 0 for v in values)))
        except ValueError as exc:
            raise ParseError(str(exc), reader.line_num) from None
    if not members:
        raise ParseError("series CSV has no rows", reader.line_num)
    return SeriesSet(tuple(members), event_boundaries)


# --- dissimilarity matrix --------------------------------------------------

def _flatten(tag: Mapping[str, Any], prefix: str = "") -> list[tuple[str, Any]]:
    out = []
    for key, value in tag.items():
        if isinstance(value, Mapping):
            out.extend(_flatten(value, f"{prefix}{key}."))
        else:
            out.append((f"{prefix}{key}", value))
    return out


def _unflatten(items: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in items:
        node = out
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = value
    return out


def matrix_text(m: DissimilarityMatrix) -> str:
    tag = " ".join(f"{k}={v}" for k, v in _flatten(m.measure_tag))
    lines = [f"{MATRIX_MAGIC} {tag}".rstrip()]
    if m.subject_ids is not None:
        for sid in m.subject_ids:
            if not sid or any(c.isspace() for c in sid):
                raise ParseError(f"subject id {sid!r} cannot be written to a matrix file")
        lines.append("# ids " + " ".join(m.subject_ids))
    lines.append(str(m.size))
    E = m.entries
    for i in range(1, m.size):
        lines.append(" ".join(_num(E[i, j]) for j in range(i)))
    return "\n".join(lines) + "\n"


def read_matrix_text(text: str) -> DissimilarityMatrix:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MATRIX_MAGIC):
        raise ParseError("not a dissimilarity matrix file", 1)
    items = []
    for token in lines[0][len(MATRIX_MAGIC):].split():
        key, _, value = token.partition("=")
        items.append((key, _parse_scalar(value)))
    pos = 1
    ids = None
    if pos < len(lines) and lines[pos].startswith("# ids"):
        ids = tuple(lines[pos][len("# ids"):].split())
        pos += 1
    try:
        K = int(lines[pos])
    except (IndexError, ValueError):
        raise ParseError("missing matrix size line", pos + 1) from None
    E = np.zeros((K, K))
    for i in range(1, K):
        line_no = pos + i + 1
        try:
            row = [float(v) for v in lines[pos + i].split()]
        except (IndexError, ValueError):
            raise ParseError(f"bad matrix row {i}", line_no) from None
        if len(row) != i:
            raise ParseError(f"matrix row {i} has {len(row)} entries, expected {i}", line_no)
        E[i, :i] = row
    E = E + E.T
    return DissimilarityMatrix(E, _unflatten(items), ids)


# --- dendrogram ------------------------------------------------------------

def merge_list_text(dend: Dendrogram, measure_tag: Mapping[str, Any] | None = None) -> str:
    """Merge list with a provenance comment giving the Ward convention and the input matrix's tag."""
    tag = dict(WARD_CONVENTION)
    if measure_tag:
        tag["matrix"] = dict(measure_tag)
    header = MERGES_MAGIC + " " + " ".join(f"{k}={v}" for k, v in _flatten(tag)) + "\n"
    return header + "".join(
        f"{m} {mg.left} {mg.right} {_num(mg.height)} {mg.size}\n" for m, mg in enumerate(dend.merges, start=1)
    )


def read_merge_list(text: str) -> Dendrogram:
    merges = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ParseError(f"expected 5 fields, got {len(parts)}", line_no)
        try:
            idx, left, right, size = int(parts[0]), int(parts[1]), int(parts[2]), int(parts[4])
            height = float(parts[3])
        except ValueError:
            raise ParseError("malformed merge line", line_no) from None
        if idx != len(merges) + 1:
            raise ParseError(f"merge index {idx} out of sequence", line_no)
        merges.append(Merge(left, right, height, size))
    return Dendrogram(tuple(merges), len(merges) + 1)


# --- labels ----------------------------------------------------------------

def labels_csv(p: Partition) -> str:
    ids = p.subject_ids or tuple(str(i) for i in range(len(p)))
    return "subject_id,cluster\n" + "".join(f"{sid},{lab}\n" for sid, lab in zip(ids, p.labels))


def read_labels_csv(text: str) -> Partition:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["subject_id", "cluster"]:
        raise ParseError("labels CSV must have header subject_id,cluster", 1)
    ids, labels = [], []
    for row in reader:
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", reader.line_num)
        try:
            labels.append(int(row[1]))
        except ValueError:
            raise ParseError(f"bad cluster label {row[1]!r}", reader.line_num) from None
        ids.append(row[0])
    if not labels:
        raise ParseError("labels CSV has no rows")
    return Partition(np.array(labels), max(labels), tuple(ids))


def align_partition(p: Partition, subject_ids) -> Partition:
    """Reorder a labelled partition to follow ``subject_ids``."""
    if p.subject_ids is None:
        raise ParseError("partition has no subject ids to align")
    index = {sid: lab for sid, lab in zip(p.subject_ids, p.labels)}
    missing = [s for s in subject_ids if s not in index]
    if missing:
        raise ParseError(f"labels missing for subjects: {', '.join(missing[:5])}")
    return Partition(np.array([index[s] for s in subject_ids]), p.k, tuple(subject_ids))


# --- config ----------------------------------------------------------------

def parse_config(text: str) -> dict[str, str]:
    out = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ParseError(f"expected 'key = value', got {line!r}", line_no)
        key = key.strip().replace("-", "_")
        if key in out:
            raise ParseError(f"duplicate key {key!r}", line_no)
        out[key] = value.strip()
    return out
