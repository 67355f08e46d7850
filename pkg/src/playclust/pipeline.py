"""Named clustering presets and the representation -> distance -> Ward chain."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from .core import Dendrogram, DissimilarityMatrix, Partition, SeriesSet
from .dissim import MeasureConfig, pairwise_matrix
from .errors import BadConfig
from .hcluster import agglomerate_ward, cut
from .represent import apply_representation


@dataclass(frozen=True)
class Preset:
    name: str
    measure: MeasureConfig
    representation: Mapping[str, Any] = field(default_factory=lambda: {"name": "raw"})
    default_k: int = 8


PRESETS = {
    # correlation distance on the 7-day moving-average trend, for dense series
    "cor-trend": Preset("cor-trend", MeasureConfig("cor"), {"name": "trend", "window": 7}, 8),
    # complexity-invariant distance on raw values, for sparse purchase series
    "cid-raw": Preset("cid-raw", MeasureConfig("cid"), {"name": "raw"}, 5),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise BadConfig(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}") from None


@dataclass(frozen=True)
class ClusteringResult:
    matrix: DissimilarityMatrix
    dendrogram: Dendrogram
    partition: Partition


def dissimilarities(
    series: SeriesSet,
    measure: MeasureConfig,
    representation: Mapping[str, Any] | None = None,
    jobs: int = 1,
) -> DissimilarityMatrix:
    transformed = apply_representation(series, representation)
    return pairwise_matrix(transformed, measure, representation=representation, jobs=jobs)


def cluster_series(
    series: SeriesSet,
    preset: Preset | str | None = None,
    k: int | None = None,
    *,
    measure: MeasureConfig | None = None,
    representation: Mapping[str, Any] | None = None,
    jobs: int = 1,
) -> ClusteringResult:
    """Cluster a SeriesSet with a preset, or an explicit measure and representation."""
    if isinstance(preset, str):
        preset = get_preset(preset)
    if preset is not None:
        measure = measure or preset.measure
        representation = representation if representation is not None else preset.representation
        k = k if k is not None else preset.default_k
    if measure is None or k is None:
        raise BadConfig("give a preset, or both a measure and k")
    matrix = dissimilarities(series, measure, representation, jobs)
    dend = agglomerate_ward(matrix)
    part = cut(dend, k)
    return ClusteringResult(matrix, dend, Partition(part.labels, part.k, series.subject_ids))
