"""Command-line front end.

Subcommands: synth, cohort, cluster, validate, report, render and pipeline.
Every option can also be given in a ``key = value`` config file passed with
``--config``; flags given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import datetime as dt
import sys
from pathlib import Path
from typing import Any, Callable

from . import cohort, serialize, synthgen, viz
from .core import Partition, SeriesSet, VariableKind, as_date
from .dissim import MEASURES, MeasureConfig, default_jobs
from .errors import BadConfig, DegenerateMatrix, PlayclustError, SingleCluster
from .hcluster import agglomerate_ward, cut
from .pipeline import PRESETS, ClusteringResult, dissimilarities, get_preset
from .represent import REPRESENTATIONS, SaxConfig
from .validate import DEGENERATE_DIAMETER, adjusted_rand, dunn, hubert_gamma, silhouette_avg, variation_of_information


def _bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise BadConfig(f"expected a boolean, got {text!r}")


def _optional_int(text: str) -> int | None:
    return None if str(text).lower() in ("", "none") else int(text)


def _kind(text: str) -> str:
    kinds = [k.value for k in VariableKind]
    if text not in kinds:
        raise BadConfig(f"unknown variable {text!r}; expected one of {', '.join(kinds)}")
    return text


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in str(text).split(",") if t.strip())


def _date_list(text: str) -> tuple[dt.date, ...]:
    return tuple(as_date(t.strip()) for t in str(text).split(",") if t.strip())


# name -> (type, default, help)
OPTIONS: dict[str, tuple[Callable[[str], Any], Any, str]] = {
    "out": (str, ".", "output directory"),
    # synthetic data
    "synth_kind": (str, None, "benchmark kind: shape, phase or sparse"),
    "seed": (int, 0, "random seed for synthesis and sampling"),
    # inputs
    "activity": (str, None, "activity CSV"),
    "attributes": (str, None, "subject attributes CSV"),
    "series": (str, None, "series CSV written by 'cohort'"),
    "matrix": (str, None, "dissimilarity matrix file written by 'cluster'"),
    "merges": (str, None, "merge list written by 'cluster'"),
    "labels": (str, None, "labels CSV written by 'cluster'"),
    "truth": (str, None, "ground-truth labels CSV"),
    # cohort
    "p_start": (as_date, None, "first day of the observation period (YYYY-MM-DD)"),
    "n_weeks": (int, 3, "length of the observation period in weeks"),
    "variable": (_kind, "time", "variable to extract: time, sessions, actions or purchase"),
    "min_active_days": (int, 6, "minimum active days in every week"),
    "require_purchase": (_bool, True, "purchase cohorts keep only subjects who spent in the period"),
    "sample_size": (int, 1000, "maximum number of sampled subjects"),
    "events": (_int_list, None, "event boundaries as comma-separated day offsets"),
    # clustering
    "preset": (str, None, f"named pipeline: {', '.join(PRESETS)}"),
    "measure": (str, None, f"dissimilarity: {', '.join(MEASURES)}"),
    "representation": (str, None, f"series representation: {', '.join(REPRESENTATIONS)}"),
    "trend_window": (int, 7, "moving-average window for the trend representation"),
    "paa_w": (int, None, "segment count for the paa representation"),
    "cort_k": (float, 2.0, "steepness of the CORT weight"),
    "ce_epsilon": (float, 1e-12, "complexity floor for CID"),
    "sax_w": (int, 7, "SAX word length"),
    "sax_alpha": (int, 3, "SAX alphabet size"),
    "dwt_level": (int, 1, "Haar decomposition level"),
    "dwt_keep": (_optional_int, None, "number of leading DWT coefficients kept"),
    "k": (int, None, "number of clusters"),
    "jobs": (int, None, "worker processes for the dissimilarity matrix"),
    # reports
    "checkpoints": (_date_list, None, "churn checkpoints as comma-separated dates"),
    "churn_window": (int, 30, "inactivity window in days that defines churn"),
    "report_name": (str, "clusters", "prefix used in figure names"),
}

COMMANDS = {
    "synth": ("write benchmark activity, attributes and truth CSVs", ["out", "synth_kind", "seed"]),
    "cohort": (
        "filter and sample subjects, write a series CSV",
        ["out", "activity", "attributes", "p_start", "n_weeks", "variable", "min_active_days",
         "require_purchase", "sample_size", "seed"],
    ),
    "cluster": (
        "compute the dissimilarity matrix, Ward tree and partition",
        ["out", "series", "preset", "measure", "representation", "trend_window", "paa_w", "cort_k",
         "ce_epsilon", "sax_w", "sax_alpha", "dwt_level", "dwt_keep", "k", "jobs"],
    ),
    "validate": ("compute validity indices for a labels file", ["out", "labels", "matrix", "truth"]),
    "report": (
        "write cluster characteristics and churn tables",
        ["out", "labels", "attributes", "series", "checkpoints", "churn_window"],
    ),
    "render": (
        "write SVG figures",
        ["out", "series", "labels", "merges", "events", "report_name"],
    ),
    "pipeline": ("run every stage from one configuration", list(OPTIONS)),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="playclust", description="Time series clustering of player telemetry.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (help_text, keys) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="key = value file; flags override its values")
        for key in keys:
            _, default, help_ = OPTIONS[key]
            suffix = "" if default is None else f" (default: {default})"
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None, help=help_ + suffix)
    return parser


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Merge defaults, config file values and flags, in increasing priority."""
    keys = COMMANDS[args.command][1]
    raw: dict[str, Any] = {}
    if args.config:
        cfg = serialize.parse_config(_read(args.config))
        unknown = sorted(set(cfg) - set(OPTIONS))
        if unknown:
            raise BadConfig(f"{args.config}: unknown keys {', '.join(unknown)}")
        raw.update({k: v for k, v in cfg.items() if k in keys})
    raw.update({k: getattr(args, k) for k in keys if getattr(args, k) is not None})
    out: dict[str, Any] = {}
    for key in keys:
        conv, default, _ = OPTIONS[key]
        if key in raw:
            try:
                out[key] = conv(raw[key])
            except (ValueError, TypeError) as exc:
                raise BadConfig(f"invalid value for {key}: {raw[key]!r} ({exc})") from None
        else:
            out[key] = default
    return out


def _read(path) -> str:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {p}")
    return p.read_text(encoding="utf-8")


def _require(opts: dict[str, Any], *keys: str) -> None:
    missing = [k for k in keys if opts.get(k) is None]
    if missing:
        raise BadConfig("missing required option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path


# --- stages ----------------------------------------------------------------

def run_synth(opts) -> dict[str, Path]:
    _require(opts, "synth_kind")
    series, truth = synthgen.make_benchmark(opts["synth_kind"], opts["seed"])
    activity, attributes = synthgen.benchmark_csv(series, opts["seed"])
    out = Path(opts["out"])
    return {
        "activity": _write(out, "activity.csv", activity),
        "attributes": _write(out, "attributes.csv", attributes),
        "truth": _write(out, "truth.csv", synthgen.truth_csv(truth)),
        "p_start": series.start_date,
        "n_weeks": series.length // 7,
        "variable": series.variable_kind.value,
    }


def run_cohort(opts) -> SeriesSet:
    _require(opts, "activity", "attributes", "p_start")
    store = cohort.load_store(opts["activity"], opts["attributes"])
    cfg = cohort.CohortConfig(
        opts["p_start"], opts["n_weeks"], VariableKind(opts["variable"]), opts["min_active_days"],
        opts["require_purchase"], opts["sample_size"], opts["seed"],
    )
    series = cohort.build_cohort(store, cfg)
    _write(Path(opts["out"]), "series.csv", serialize.series_csv(series))
    return series


def _measure(opts) -> tuple[MeasureConfig | None, dict | None]:
    measure = None
    if opts.get("measure") is not None:
        measure = MeasureConfig(
            opts["measure"], cort_k=opts["cort_k"], ce_epsilon=opts["ce_epsilon"],
            sax=SaxConfig(opts["sax_w"], opts["sax_alpha"]) if opts["measure"] == "sax" else None,
            dwt_level=opts["dwt_level"], dwt_keep=opts["dwt_keep"],
        )
    rep = None
    if opts.get("representation") is not None:
        rep = {"name": opts["representation"]}
        if rep["name"] == "trend":
            rep["window"] = opts["trend_window"]
        elif rep["name"] == "paa":
            _require(opts, "paa_w")
            rep["w"] = opts["paa_w"]
    return measure, rep


def run_cluster(opts, series: SeriesSet | None = None) -> ClusteringResult:
    if series is None:
        _require(opts, "series")
        series = serialize.read_series_csv(_read(opts["series"]))
    measure, rep = _measure(opts)
    k = opts["k"]
    if opts["preset"] is not None:
        preset = get_preset(opts["preset"])
        measure = measure or preset.measure
        rep = rep if rep is not None else dict(preset.representation)
        k = k if k is not None else preset.default_k
    if measure is None:
        raise BadConfig("give --preset or --measure")
    if k is None:
        raise BadConfig("give --k or a preset with a default k")
    jobs = opts["jobs"] if opts["jobs"] is not None else default_jobs()
    matrix = dissimilarities(series, measure, rep, jobs)
    dend = agglomerate_ward(matrix)
    part = cut(dend, k)
    part = Partition(part.labels, part.k, series.subject_ids)
    out = Path(opts["out"])
    _write(out, "matrix.txt", serialize.matrix_text(matrix))
    _write(out, "merges.txt", serialize.merge_list_text(dend, matrix.measure_tag))
    _write(out, "labels.csv", serialize.labels_csv(part))
    return ClusteringResult(matrix, dend, part)


def _fmt_index(value) -> str:
    if value is DEGENERATE_DIAMETER:
        return "degenerate"
    return repr(float(value))


def validation_rows(partition: Partition, matrix=None, truth: Partition | None = None) -> list[tuple[str, str]]:
    rows = [("n", str(len(partition))), ("k", str(partition.k))]
    if matrix is not None:
        if partition.k >= 2:
            rows.append(("silhouette", _fmt_index(silhouette_avg(matrix, partition))))
            rows.append(("dunn", _fmt_index(dunn(matrix, partition))))
        try:
            rows.append(("hubert_gamma", _fmt_index(hubert_gamma(matrix, partition))))
        except (DegenerateMatrix, SingleCluster):
            rows.append(("hubert_gamma", "undefined"))
    if truth is not None:
        rows.append(("ari", _fmt_index(adjusted_rand(truth, partition))))
        rows.append(("vi", _fmt_index(variation_of_information(truth, partition))))
    return rows


def run_validate(opts, partition: Partition | None = None, matrix=None, truth=None) -> list[tuple[str, str]]:
    if partition is None:
        _require(opts, "labels")
        partition = serialize.read_labels_csv(_read(opts["labels"]))
    if matrix is None and opts.get("matrix"):
        matrix = serialize.read_matrix_text(_read(opts["matrix"]))
        if matrix.subject_ids is not None:
            partition = serialize.align_partition(partition, matrix.subject_ids)
    if truth is None and opts.get("truth"):
        truth = serialize.read_labels_csv(_read(opts["truth"]))
    if truth is not None:
        truth = serialize.align_partition(truth, partition.subject_ids)
    rows = validation_rows(partition, matrix, truth)
    _write(Path(opts["out"]), "validation.csv", "metric,value\n" + "".join(f"{m},{v}\n" for m, v in rows))
    return rows


def default_checkpoints(p_end: dt.date) -> tuple[dt.date, ...]:
    return tuple(p_end + dt.timedelta(days=d) for d in (30, 60, 150))


def run_report(opts, partition: Partition | None = None, series: SeriesSet | None = None, attrs=None) -> None:
    if partition is None:
        _require(opts, "labels")
        partition = serialize.read_labels_csv(_read(opts["labels"]))
    if attrs is None:
        _require(opts, "attributes")
        attrs = cohort.ingest([], _read(opts["attributes"]).splitlines()).attributes
    if series is None and opts.get("series"):
        series = serialize.read_series_csv(_read(opts["series"]))
    checkpoints = opts.get("checkpoints")
    p_end = None
    if series is not None:
        p_end = series.start_date + dt.timedelta(days=series.length - 1)
    if checkpoints is None:
        if p_end is None:
            raise BadConfig("give --checkpoints or --series to derive them from the period end")
        checkpoints = default_checkpoints(p_end)
    churn_cfg = cohort.ChurnConfig(checkpoints, opts["churn_window"])
    if p_end is not None:
        churn_cfg.validate_against(p_end)
    chars = cohort.characteristics_table(partition, attrs)
    table = cohort.churn_table(partition, attrs, churn_cfg)
    out = Path(opts["out"])
    _write(out, "characteristics.csv", cohort.characteristics_csv(chars))
    _write(out, "characteristics.txt", cohort.characteristics_text(chars))
    _write(out, "churn.csv", cohort.churn_csv(table))
    _write(out, "churn.txt", cohort.churn_text(table))


def run_render(opts, series: SeriesSet | None = None, partition: Partition | None = None, dend=None) -> list[Path]:
    if series is None:
        _require(opts, "series")
        series = serialize.read_series_csv(_read(opts["series"]), opts.get("events"))
    elif opts.get("events") is not None:
        series = SeriesSet(series.series, opts["events"])
    if partition is None:
        _require(opts, "labels")
        partition = serialize.read_labels_csv(_read(opts["labels"]))
    partition = serialize.align_partition(partition, series.subject_ids)
    if dend is None and opts.get("merges"):
        dend = serialize.read_merge_list(_read(opts["merges"]))
    if dend is not None and dend.leaf_count != len(series):
        raise BadConfig(f"merge list has {dend.leaf_count} leaves but the series file has {len(series)} rows")

    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    report, variable, k = opts["report_name"], series.variable_kind.value, partition.k
    written = []
    if dend is not None:
        path = out / viz.figure_name(f"{report}-dendrogram", variable, k)
        viz.render_dendrogram(dend, path, cut_k=k, labels=series.subject_ids)
        written.append(path)
    path = out / viz.figure_name(f"{report}-means", variable, k)
    viz.render_cluster_means(series, partition, path=path)
    written.append(path)
    path = out / viz.figure_name(f"{report}-heatmap", variable, k)
    viz.render_cluster_heatmaps(series, partition, True, path, dendrogram=dend)
    written.append(path)
    if series.length % 7 == 0:
        path = out / viz.figure_name(f"{report}-boxplot", variable, k)
        viz.render_weekly_boxplots(series, partition, path)
        written.append(path)
    return written


def run_pipeline(opts) -> None:
    opts = dict(opts)
    truth_path = opts.get("truth")
    if opts.get("synth_kind"):
        synth = run_synth(opts)
        opts["activity"], opts["attributes"] = str(synth["activity"]), str(synth["attributes"])
        truth_path = str(synth["truth"])
        # the benchmark fixes the observation window
        opts["p_start"], opts["n_weeks"], opts["variable"] = synth["p_start"], synth["n_weeks"], synth["variable"]
    series = run_cohort(opts)
    if opts.get("events") is not None:
        series = SeriesSet(series.series, opts["events"])
    result = run_cluster(opts, series)
    truth = serialize.read_labels_csv(_read(truth_path)) if truth_path else None
    run_validate(opts, result.partition, result.matrix, truth)
    store = cohort.load_store(opts["activity"], opts["attributes"])
    run_report(opts, result.partition, series, store.attributes)
    run_render(opts, series, result.partition, result.dendrogram)


RUNNERS = {
    "synth": run_synth,
    "cohort": run_cohort,
    "cluster": run_cluster,
    "validate": run_validate,
    "report": run_report,
    "render": run_render,
    "pipeline": run_pipeline,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve(args)
        RUNNERS[args.command](opts)
    except (PlayclustError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
