import numpy as np
import pytest

from playclust.cohort import CohortConfig, build_cohort, ingest
from playclust.core import VariableKind
from playclust.errors import BadSpec
from playclust.synthgen import (
    EVENT_ARCHETYPES,
    Archetype,
    BenchmarkSpec,
    SparseRegime,
    benchmark_csv,
    generate_shape_benchmark,
    generate_sparse_benchmark,
    make_benchmark,
    shift_right,
)


def test_noise_free_single_archetype_reproduces_template():
    spec = BenchmarkSpec((Archetype((1, 2, 3)), Archetype((3, 2, 1))), n_per_cluster=4, noise_sd=0.0,
                         amplitude_range=(1.0, 1.0))
    s, truth = generate_shape_benchmark(spec)
    for i in range(len(s)):
        arch = spec.archetypes[truth.labels[i] - 1]
        np.testing.assert_allclose(s[i].values, arch.template(21))


def test_shape_benchmark_structure():
    s, truth = make_benchmark("shape", seed=4)
    assert len(s) == 100 and s.length == 21
    assert truth.k == 4 and truth.sizes.tolist() == [25] * 4
    assert truth.subject_ids == s.subject_ids
    assert np.all(s.values >= 0)
    # cluster means follow the templates up to amplitude scaling and noise
    for c, arch in enumerate(EVENT_ARCHETYPES, start=1):
        mean = s.values[truth.members(c)].mean(axis=0)
        r = np.corrcoef(mean, arch.template(21))[0, 1]
        assert r > 0.95


def test_seed_determinism():
    a, ta = make_benchmark("sparse", seed=3)
    b, tb = make_benchmark("sparse", seed=3)
    c, _ = make_benchmark("sparse", seed=4)
    assert np.array_equal(a.values, b.values) and np.array_equal(ta.labels, tb.labels)
    assert not np.array_equal(a.values, c.values)


def test_phase_shift():
    x = np.arange(5.0)
    assert shift_right(x, 2).tolist() == [0.0, 0.0, 0.0, 1.0, 2.0]
    s, _ = make_benchmark("phase", seed=0)
    assert s.length == 21 and len(s) == 60


def test_sparsity_extremes():
    regimes = (SparseRegime(0.5, (1, 2), 2), SparseRegime(0.1, (5, 6), 1))
    s, _ = generate_sparse_benchmark(BenchmarkSpec(regimes, n_per_cluster=5, sparsity=1.0))
    assert np.all(s.values == 0)
    s, truth = generate_sparse_benchmark(BenchmarkSpec(regimes, n_per_cluster=5, sparsity=0.0))
    assert s.variable_kind is VariableKind.PURCHASE
    counts = (s.values > 0).sum(axis=1)
    assert np.all(counts[truth.labels == 1] >= 2) and np.all(counts[truth.labels == 2] >= 1)


@pytest.mark.parametrize("kwargs", [
    dict(archetypes=(Archetype((1, 2)),)),
    dict(n_per_cluster=0),
    dict(length=5),
    dict(noise_sd=-1),
    dict(phase_shift_days=30),
    dict(amplitude_range=(2, 1)),
    dict(sparsity=1.5),
])
def test_bad_specs(kwargs):
    params = dict(archetypes=EVENT_ARCHETYPES)
    params.update(kwargs)
    with pytest.raises(BadSpec):
        BenchmarkSpec(**params)
    with pytest.raises(BadSpec):
        make_benchmark("fourier")


@pytest.mark.parametrize("kind", ["shape", "phase", "sparse"])
def test_benchmark_csv_passes_cohort_filters(kind):
    s, _ = make_benchmark(kind, seed=1)
    activity, attributes = benchmark_csv(s, seed=1)
    store = ingest(activity, attributes)
    cohort = build_cohort(store, CohortConfig(s.start_date, s.length // 7, s.variable_kind))
    assert cohort.subject_ids == tuple(sorted(s.subject_ids))
    order = [s.subject_ids.index(i) for i in cohort.subject_ids]
    np.testing.assert_allclose(cohort.values, s.values[order])
