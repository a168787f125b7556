"""Brute-force ground truth: exhaustive enumeration of marked matchings for
small ``n`` and a uniform sampler for Monte Carlo checks at larger ``n``."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import stats as _sps

from . import kernels_numpy
from ._accel import resolve_backend
from .errors import ConsistencyError
from .exact import CountTable, StatKind, count_row, double_factorial, total_configurations

__all__ = [
    "MarkedMatching",
    "QuadCount",
    "OracleResult",
    "MonteCarloResult",
    "DEFAULT_CAP",
    "OVERRIDE_CAP",
    "RNG_ALGORITHM",
    "classify",
    "enumerate_counts",
    "sample_batch",
    "sample_uniform",
    "monte_carlo",
]

DEFAULT_CAP = 8
OVERRIDE_CAP = 9
# Draws per independently seeded chunk; fixed so results do not depend on threads.
CHUNK_DRAWS = 1 << 16
RNG_ALGORITHM = f"numpy.random.Philox (numpy {np.__version__}); chunk seeds SeedSequence(seed, spawn_key=(chunk,))"


def _kernels(backend: str | None):
    if resolve_backend(backend) == "numba":
        from . import kernels_numba

        return kernels_numba
    return kernels_numpy


@dataclass(frozen=True)
class MarkedMatching:
    """Perfect matching of vertices ``0..2n-1`` with chord ``marked`` singled
    out; chords are numbered by ascending left endpoint."""

    n: int
    partner: tuple[int, ...]
    marked: int

    def __post_init__(self) -> None:
        m = 2 * self.n
        if self.n < 1 or len(self.partner) != m:
            raise ValueError(f"need 2n = {m} partner entries, got {len(self.partner)}")
        for v, w in enumerate(self.partner):
            if not 0 <= w < m or w == v or self.partner[w] != v:
                raise ValueError(f"partner is not a fixed-point-free involution at vertex {v}")
        if not 0 <= self.marked < self.n:
            raise ValueError(f"marked chord {self.marked} outside [0, {self.n - 1}]")

    @classmethod
    def from_chords(cls, chords: Sequence[tuple[int, int]], marked: int = 0) -> "MarkedMatching":
        n = len(chords)
        partner = [-1] * (2 * n)
        for a, b in chords:
            partner[a] = b
            partner[b] = a
        return cls(n, tuple(partner), marked)

    @property
    def chords(self) -> list[tuple[int, int]]:
        return [(v, w) for v, w in enumerate(self.partner) if w > v]

    @property
    def marked_chord(self) -> tuple[int, int]:
        return self.chords[self.marked]

    @property
    def size(self) -> int:
        i, j = self.marked_chord
        return j - i - 1


@dataclass(frozen=True)
class QuadCount:
    k: int
    c: int
    g: int
    x: int

    def __getitem__(self, stat: StatKind) -> int:
        return (self.k, self.c, self.g, self.x)[StatKind.parse(stat).index]


def classify(m: MarkedMatching) -> QuadCount:
    """Relation of every other chord to the marked one, by pairwise comparison."""
    i, j = m.marked_chord
    k = c = g = x = 0
    for a, b in m.chords:
        if (a, b) == (i, j):
            continue
        cases = (
            (a < i < b < j) or (i < a < j < b),
            i < a and b < j,
            a < i and j < b,
            b < i or a > j,
        )
        if sum(cases) != 1:
            raise ConsistencyError(f"chord ({a}, {b}) matches {sum(cases)} relations to ({i}, {j})")
        k += cases[0]
        c += cases[1]
        g += cases[2]
        x += cases[3]
    if k + c + g + x != m.n - 1:
        raise ConsistencyError(f"partition identity failed for {m}")
    return QuadCount(k, c, g, x)


# -- exhaustive enumeration --------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    n: int
    tables: dict[StatKind, CountTable]
    size_counts: tuple[int, ...]
    visited: int
    violations: int
    backend: str

    def __getitem__(self, stat: StatKind | str) -> CountTable:
        return self.tables[StatKind.parse(stat)]


def enumerate_counts(
    n: int,
    *,
    allow_large: bool = False,
    threads: int = 1,
    backend: str | None = None,
) -> OracleResult:
    """Visit every perfect matching of ``2n`` vertices once, and every choice
    of marked chord, tallying the four relation counts.

    Work is split on the partner of vertex 0 (``2n - 1`` subtrees).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cap = OVERRIDE_CAP if allow_large else DEFAULT_CAP
    if n > cap:
        hint = "" if allow_large or n > OVERRIDE_CAP else f" (n = {OVERRIDE_CAP} needs the large-n override)"
        raise ValueError(f"enumeration capped at n = {cap}, got n = {n}{hint}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    backend = resolve_backend(backend)
    kern = _kernels(backend)

    def run(first: int):
        return kern.enumerate_subtree(n, first)

    firsts = range(1, 2 * n)
    if threads == 1:
        parts = [run(f) for f in firsts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, firsts))

    tally = np.zeros((4, n), dtype=np.int64)
    sizes = np.zeros(2 * n - 1, dtype=np.int64)
    visited = violations = 0
    for t, s, vis, bad in parts:
        tally += t
        sizes += s
        visited += int(vis)
        violations += int(bad)

    expected = total_configurations(n)
    if visited != expected:
        raise ConsistencyError(f"enumeration visited {visited} marked diagrams, expected {expected}")
    if violations:
        raise ConsistencyError(f"{violations} diagrams violated k + c + g + x = n - 1")
    tables = {
        stat: CountTable(stat, n, tuple(int(v) for v in tally[stat.index]))
        for stat in StatKind
    }
    return OracleResult(n, tables, tuple(int(v) for v in sizes), visited, violations, backend)


# -- sampling -------------------------------------------------------------------------


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    )


def _draw_chunk(n: int, rows: int, seed: int, chunk: int) -> tuple[np.ndarray, np.ndarray]:
    rng = _chunk_rng(seed, chunk)
    choices = rng.integers(0, kernels_numpy.radices(n), size=(rows, n), dtype=np.int64)
    marks = rng.integers(0, n, size=rows, dtype=np.int64)
    return choices, marks


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def sample_batch(
    n: int, reps: int, seed: int, backend: str | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """``reps`` uniform marked matchings as ``(partner[reps, 2n], marks[reps])``."""
    if n < 1 or reps < 0:
        raise ValueError(f"need n >= 1 and reps >= 0, got n={n}, reps={reps}")
    seed = _check_seed(seed)
    kern = _kernels(backend)
    partners, marks = [], []
    for chunk, start in enumerate(range(0, reps, CHUNK_DRAWS)):
        choices, mk = _draw_chunk(n, min(CHUNK_DRAWS, reps - start), seed, chunk)
        partners.append(kern.decode(choices, n))
        marks.append(mk)
    if not partners:
        return np.empty((0, 2 * n), dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(partners), np.concatenate(marks)


def sample_uniform(n: int, seed: int) -> MarkedMatching:
    partner, marks = sample_batch(n, 1, seed)
    return MarkedMatching(n, tuple(int(v) for v in partner[0]), int(marks[0]))


@dataclass
class MonteCarloResult:
    n: int
    reps: int
    seed: int
    counts: np.ndarray  # (4, n) hits per statistic and value
    size_counts: np.ndarray  # (2n - 1,)
    sums: np.ndarray  # (4,) sum of each statistic
    sums_sq: np.ndarray  # (4,)
    rng_algorithm: str = RNG_ALGORITHM
    chi_square: dict[StatKind, tuple[float, int, float]] = field(default_factory=dict)

    def freqs(self, stat: StatKind | str) -> np.ndarray:
        return self.counts[StatKind.parse(stat).index] / self.reps

    def stderr(self, stat: StatKind | str) -> np.ndarray:
        f = self.freqs(stat)
        return np.sqrt(f * (1 - f) / self.reps)

    def mean(self, stat: StatKind | str) -> float:
        return float(self.sums[StatKind.parse(stat).index] / self.reps)

    def mean_stderr(self, stat: StatKind | str) -> float:
        s = StatKind.parse(stat).index
        mu = self.sums[s] / self.reps
        var = self.sums_sq[s] / self.reps - mu * mu
        if self.reps > 1:
            var *= self.reps / (self.reps - 1)
        return float(math.sqrt(max(var, 0.0) / self.reps))


def chi_square(
    observed: Sequence[int], expected_probs: Sequence[Fraction | float], min_expected: float = 5.0
) -> tuple[float, int, float]:
    """Pearson statistic with low-expectation bins pooled; returns
    ``(statistic, degrees of freedom, p-value)``."""
    obs = np.asarray(observed, dtype=float)
    total = obs.sum()
    exp = np.asarray([float(q) for q in expected_probs]) * total
    bins_o, bins_e = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(obs, exp):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            bins_o.append(acc_o)
            bins_e.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if bins_e:
            bins_o[-1] += acc_o
            bins_e[-1] += acc_e
        else:
            bins_o.append(acc_o)
            bins_e.append(acc_e)
    dof = len(bins_e) - 1
    if dof < 1:
        return 0.0, 0, 1.0
    o = np.asarray(bins_o)
    e = np.asarray(bins_e)
    stat = float(((o - e) ** 2 / e).sum())
    return stat, dof, float(_sps.chi2.sf(stat, dof))


def monte_carlo(
    n: int,
    reps: int,
    seed: int,
    *,
    exact: dict[StatKind, Sequence[Fraction]] | None = None,
    exact_max_n: int = 400,
    threads: int = 1,
    backend: str | None = None,
) -> MonteCarloResult:
    """Empirical distributions of the four statistics over ``reps`` uniform draws.

    Chunks of draws use independently derived seeds, so the result depends only
    on ``(n, reps, seed)``.  A chi-square statistic is attached for every
    statistic whose exact law is supplied or cheap to compute (``n <= exact_max_n``).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    seed = _check_seed(seed)
    kern = _kernels(backend)

    def run(chunk: int):
        start = chunk * CHUNK_DRAWS
        choices, marks = _draw_chunk(n, min(CHUNK_DRAWS, reps - start), seed, chunk)
        res, bad = kern.classify(kern.decode(choices, n), marks)
        return res, bad

    chunks = range(math.ceil(reps / CHUNK_DRAWS))
    if threads == 1:
        parts = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, chunks))

    counts = np.zeros((4, n), dtype=np.int64)
    sizes = np.zeros(2 * n - 1, dtype=np.int64)
    sums = np.zeros(4, dtype=np.float64)
    sums_sq = np.zeros(4, dtype=np.float64)
    for res, bad in parts:
        if bad:
            raise ConsistencyError(f"{bad} sampled diagrams violated k + c + g + x = n - 1")
        for s in range(4):
            counts[s] += np.bincount(res[:, s], minlength=n)[:n]
        sizes += np.bincount(res[:, 4], minlength=2 * n - 1)[: 2 * n - 1]
        block = res[:, :4].astype(np.float64)
        sums += block.sum(axis=0)
        sums_sq += (block * block).sum(axis=0)

    result = MonteCarloResult(n, reps, seed, counts, sizes, sums, sums_sq)
    if exact is None and n <= exact_max_n:
        norm = total_configurations(n)
        exact = {
            stat: [Fraction(c, norm) for c in count_row(stat, n).counts] for stat in StatKind
        }
    if exact:
        for stat, probs in exact.items():
            result.chi_square[StatKind.parse(stat)] = chi_square(
                counts[StatKind.parse(stat).index], probs
            )
    return result


def matching_count(n: int) -> int:
    """Number of perfect matchings of ``2n`` points."""
    return double_factorial(2 * n - 1)
