"""
From telemetry tables to cluster reports
========================================

Write synthetic activity and attribute tables, select the cohort that
played six days a week through the period, cluster it and summarize each
cluster's paying share, level and churn.
"""

import datetime as dt
import sys
from pathlib import Path

from playclust.cohort import (
    ChurnConfig,
    CohortConfig,
    build_cohort,
    characteristics_table,
    characteristics_text,
    churn_table,
    churn_text,
    load_store,
)
from playclust.pipeline import cluster_series
from playclust.synthgen import benchmark_csv, make_benchmark

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

series, _ = make_benchmark("shape", seed=2)
activity, attributes = benchmark_csv(series, seed=2)
(out / "activity.csv").write_text(activity)
(out / "attributes.csv").write_text(attributes)

store = load_store(out / "activity.csv", out / "attributes.csv")
cfg = CohortConfig(p_start=series.start_date, n_weeks=3, sample_size=60, rng_seed=1)
cohort = build_cohort(store, cfg)
print(f"{len(store)} subjects in the store, {len(cohort)} sampled into the cohort")

result = cluster_series(cohort, "cor-trend", k=4)
print(characteristics_text(characteristics_table(result.partition, store)))

checkpoints = [cfg.p_end + dt.timedelta(days=d) for d in (30, 60, 150)]
print(churn_text(churn_table(result.partition, store, ChurnConfig(checkpoints, 30))))
