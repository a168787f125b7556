import os
import subprocess
import sys
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from chordstats import exact, oracle
from chordstats._accel import NUMBA_AVAILABLE
from chordstats.exact import StatKind
from chordstats.oracle import MarkedMatching, QuadCount
from chordstats.series import gf_table

BACKENDS = ["numpy"] + (["numba"] if NUMBA_AVAILABLE else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


# -- classification -------------------------------------------------------------------


@pytest.mark.parametrize(
    "chords, expected",
    [
        ([(0, 2), (1, 3)], QuadCount(1, 0, 0, 0)),
        ([(0, 1), (2, 3)], QuadCount(0, 0, 0, 1)),
        ([(0, 3), (1, 2)], QuadCount(0, 1, 0, 0)),
    ],
)
def test_classify_examples(chords, expected):
    assert oracle.classify(MarkedMatching.from_chords(chords, 0)) == expected


def test_classify_containing_and_indexing():
    m = MarkedMatching.from_chords([(0, 5), (1, 2), (3, 4)], marked=1)
    assert m.marked_chord == (1, 2) and m.size == 0
    q = oracle.classify(m)
    assert q == QuadCount(0, 0, 1, 1)
    assert q[StatKind.CONTAINING] == 1


@pytest.mark.parametrize(
    "n, partner, marked",
    [(2, (1, 0, 3), 0), (2, (0, 1, 3, 2), 0), (2, (1, 0, 3, 2), 2), (2, (2, 0, 3, 1), 0)],
)
def test_marked_matching_validation(n, partner, marked):
    with pytest.raises(ValueError):
        MarkedMatching(n, partner, marked)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_kernel_classify_matches_reference(n, backend):
    partners, marks = oracle.sample_batch(n, 300, seed=11, backend=backend)
    out, bad = oracle._kernels(backend).classify(partners, marks)
    assert bad == 0
    for row, mk, res in zip(partners, marks, out):
        m = MarkedMatching(n, tuple(int(v) for v in row), int(mk))
        q = oracle.classify(m)
        assert tuple(res) == (q.k, q.c, q.g, q.x, m.size)


# -- exhaustive enumeration --------------------------------------------------------------


def test_enumerate_n2_small_tables(backend):
    res = oracle.enumerate_counts(2, backend=backend)
    assert [list(res[s].counts) for s in "KCGX"] == [[4, 2], [5, 1], [5, 1], [4, 2]]
    assert res.visited == 6 and res.violations == 0
    assert list(oracle.enumerate_counts(3, backend=backend)["G"].counts) == [32, 11, 2]
    assert all(list(t.counts) == [1] for t in oracle.enumerate_counts(1, backend=backend).tables.values())


@pytest.mark.parametrize("n", range(1, 8))
def test_enumeration_matches_exact_and_series(n, backend):
    res = oracle.enumerate_counts(n, backend=backend)
    assert res.visited == exact.total_configurations(n)
    assert res.violations == 0
    tables = {stat: gf_table(stat, n)[-1] for stat in "KCGX"}
    for stat in "KCGX":
        assert res[stat] == exact.count_row(stat, n)
        assert list(res[stat].counts) == tables[stat]
    norm = exact.total_configurations(n)
    probs = exact.size_distribution(n).probs
    assert [Fraction(c, norm) for c in res.size_counts] == list(probs)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumeration_matches_independent_brute_force(n, brute):
    tally = brute(n)
    res = oracle.enumerate_counts(n)
    for stat in "KCGX":
        expected = [sum(v for (s, p, _), v in tally.items() if s == stat and p == q) for q in range(n)]
        assert list(res[stat].counts) == expected


def test_backends_agree_and_threads_do_not_change_result():
    ref = oracle.enumerate_counts(6, backend="numpy")
    for b in BACKENDS:
        for threads in (1, 3):
            res = oracle.enumerate_counts(6, backend=b, threads=threads)
            assert res.tables == ref.tables and res.size_counts == ref.size_counts


@pytest.mark.slow
@pytest.mark.skipif(not NUMBA_AVAILABLE, reason="n = 8 is only practical with numba")
def test_enumeration_n8():
    res = oracle.enumerate_counts(8, backend="numba", threads=2)
    for stat in "KCGX":
        assert res[stat] == exact.count_row(stat, 8)


def test_enumeration_caps():
    with pytest.raises(ValueError, match="override"):
        oracle.enumerate_counts(9)
    with pytest.raises(ValueError):
        oracle.enumerate_counts(10, allow_large=True)
    with pytest.raises(ValueError):
        oracle.enumerate_counts(0)
    with pytest.raises(ValueError):
        oracle.enumerate_counts(3, threads=0)
    with pytest.raises(ValueError):
        oracle.enumerate_counts(3, backend="cuda")


# -- sampling ----------------------------------------------------------------------------


def test_sample_uniform_n1():
    for seed in (0, 1, 2**64 - 1):
        m = oracle.sample_uniform(1, seed)
        assert m.partner == (1, 0) and m.marked == 0


def test_sample_seed_range():
    with pytest.raises(ValueError):
        oracle.sample_uniform(2, -1)
    with pytest.raises(ValueError):
        oracle.sample_uniform(2, 2**64)


def test_sampler_is_deterministic_across_backends():
    a = oracle.sample_batch(6, 70000, seed=5, backend="numpy")
    for b in BACKENDS:
        p, m = oracle.sample_batch(6, 70000, seed=5, backend=b)
        assert np.array_equal(p, a[0]) and np.array_equal(m, a[1])
    other = oracle.sample_batch(6, 1000, seed=6)
    assert not np.array_equal(other[0], a[0][:1000])
    assert oracle.sample_batch(6, 0, seed=5)[0].shape == (0, 12)


def test_n2_crossing_frequency():
    res = oracle.monte_carlo(2, 10**6, seed=2024)
    assert abs(res.freqs("K")[1] - 1 / 3) <= 0.002


def test_n3_excluded_mean():
    res = oracle.monte_carlo(3, 10**6, seed=7)
    assert abs(res.mean("X") - 2 / 3) <= 0.01


def test_n3_sampler_uniform_over_matchings():
    reps = 10**6
    partners, marks = oracle.sample_batch(3, reps, seed=99)
    hits = Counter(map(bytes, partners.astype(np.int8)))
    assert len(hits) == 15
    p = 1 / 15
    se = np.sqrt(p * (1 - p) / reps)
    assert all(abs(h / reps - p) <= 4 * se for h in hits.values())
    mark_freq = np.bincount(marks, minlength=3) / reps
    assert np.all(np.abs(mark_freq - 1 / 3) <= 4 * np.sqrt(2 / 9 / reps))


def test_n5_size_marginal():
    reps = 10**5
    res = oracle.monte_carlo(5, reps, seed=31)
    probs = np.array([float(q) for q in exact.size_distribution(5).probs])
    se = np.sqrt(probs * (1 - probs) / reps)
    assert np.all(np.abs(res.size_counts / reps - probs) <= 3 * se)


def test_monte_carlo_n2_within_three_se():
    res = oracle.monte_carlo(2, 6 * 10**5, seed=17)
    f, se = res.freqs("K"), res.stderr("K")
    assert np.all(np.abs(f - np.array([2 / 3, 1 / 3])) <= 3 * se)


def test_monte_carlo_n30_crossing_mean():
    res = oracle.monte_carlo(30, 10**5, seed=30)
    assert abs(res.mean("K") - 29 / 3) <= 3 * res.mean_stderr("K")
    assert set(res.chi_square) == set(StatKind)
    assert all(pval > 1e-4 for _, _, pval in res.chi_square.values())


def test_monte_carlo_degenerate_n1():
    res = oracle.monte_carlo(1, 10, seed=0)
    assert all(list(res.counts[s]) == [10] for s in range(4))
    assert res.mean_stderr("K") == 0.0


def test_monte_carlo_reproducible_and_thread_independent(backend):
    a = oracle.monte_carlo(12, 150000, seed=3, backend="numpy")
    b = oracle.monte_carlo(12, 150000, seed=3, backend=backend, threads=2)
    assert np.array_equal(a.counts, b.counts) and np.array_equal(a.sums, b.sums)
    assert "Philox" in a.rng_algorithm


def test_monte_carlo_rejects_bad_arguments():
    with pytest.raises(ValueError):
        oracle.monte_carlo(0, 10, seed=1)
    with pytest.raises(ValueError):
        oracle.monte_carlo(3, 0, seed=1)


def test_chi_square_pools_sparse_bins():
    stat, dof, pval = oracle.chi_square([50, 48, 1, 1], [0.5, 0.48, 0.01, 0.01])
    assert dof == 1
    assert 0 <= stat and 0 <= pval <= 1
    assert oracle.chi_square([3], [1.0]) == (0.0, 0, 1.0)


def test_matching_count():
    assert [oracle.matching_count(n) for n in range(1, 6)] == [1, 3, 15, 105, 945]


@pytest.mark.parametrize("value, expected", [("1", "numpy"), ("0", None)])
def test_env_flag_selects_numpy_backend(value, expected):
    env = dict(os.environ, CHORDSTATS_DISABLE_NUMBA=value)
    code = "from chordstats._accel import default_backend; print(default_backend())"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == (expected or ("numba" if NUMBA_AVAILABLE else "numpy"))
