"""Closed-form exact counts for linear chord diagrams with one marked chord.

Every count is an arbitrary-precision ``int``; probabilities are
``fractions.Fraction``.  No floating point is used in this module.
"""

from __future__ import annotations

import enum
import functools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ConsistencyError

__all__ = [
    "StatKind",
    "CountTable",
    "SizeDistribution",
    "Method",
    "factorial",
    "double_factorial",
    "binomial",
    "total_configurations",
    "size_distribution",
    "count_crossings_by_size",
    "count_stat",
    "count_row",
    "at_least_count",
    "k_recursion_row",
    "k_recursion_table",
]


@functools.total_ordering
class StatKind(enum.Enum):
    """Relative position of another chord with respect to the marked chord."""

    CROSSING = "K"
    CONTAINED = "C"
    CONTAINING = "G"
    EXCLUDED = "X"

    @property
    def symbol(self) -> str:
        return self.value

    @property
    def index(self) -> int:
        return _STAT_ORDER[self]

    @classmethod
    def parse(cls, text: "str | StatKind") -> "StatKind":
        if isinstance(text, StatKind):
            return text
        key = text.strip()
        for stat in cls:
            if key.upper() == stat.value or key.lower() == stat.name.lower():
                return stat
        raise ValueError(f"unknown statistic {text!r}; expected one of K, C, G, X")

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, StatKind):
            return NotImplemented
        return self.index < other.index


_STAT_ORDER = {stat: i for i, stat in enumerate(StatKind)}


class Method(enum.Enum):
    DIRECT_SUM = "direct"
    CLOSED_FORM = "closed"


# -- memoized factorials -----------------------------------------------------


class _ProductCache:
    """Grow-only table of ``f(k) = k * f(k - step)``; reads need no lock."""

    def __init__(self, step: int):
        self._step = step
        self._values = [1] * step
        self._lock = threading.Lock()

    def __call__(self, k: int) -> int:
        values = self._values
        if k < len(values):
            return values[k]
        with self._lock:
            values = list(self._values)
            for j in range(len(values), k + 1):
                values.append(j * values[j - self._step])
            self._values = values
        return values[k]


_factorial = _ProductCache(1)
_double_factorial = _ProductCache(2)


def factorial(k: int) -> int:
    if k < 0:
        raise ValueError(f"factorial of negative number {k}")
    return _factorial(k)


def double_factorial(k: int) -> int:
    """``k!!`` with the empty-product convention ``(-1)!! = 0!! = 1``."""
    if k < -1:
        raise ValueError(f"double factorial needs k >= -1, got {k}")
    if k == -1:
        return 1
    return _double_factorial(k)


def binomial(a: int, b: int) -> int:
    if b < 0 or a < 0 or b > a:
        return 0
    return _factorial(a) // (_factorial(b) * _factorial(a - b))


def _check_n(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"n must be an int, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"number of pairs must be >= 1, got {n}")


def total_configurations(n: int) -> int:
    """Number of linear chord diagrams on ``2n`` points with one marked chord."""
    _check_n(n)
    return n * double_factorial(2 * n - 1)


# -- domain records -----------------------------------------------------------


@dataclass(frozen=True)
class CountTable:
    stat: StatKind
    n: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.counts) != self.n:
            raise ConsistencyError(
                f"{self.stat.symbol} row for n={self.n} has {len(self.counts)} entries"
            )
        if any(c < 0 for c in self.counts):
            raise ConsistencyError(f"negative count in {self.stat.symbol} row n={self.n}")
        total = sum(self.counts)
        if total != total_configurations(self.n):
            raise ConsistencyError(
                f"{self.stat.symbol} row n={self.n} sums to {total}, "
                f"expected {total_configurations(self.n)}"
            )

    def __getitem__(self, p: int) -> int:
        return self.counts[p]

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class SizeDistribution:
    n: int
    probs: tuple[Fraction, ...]

    def mean(self) -> Fraction:
        return sum((d * q for d, q in enumerate(self.probs)), Fraction(0))

    def variance(self) -> Fraction:
        mu = self.mean()
        return sum((d * d * q for d, q in enumerate(self.probs)), Fraction(0)) - mu * mu


def size_distribution(n: int) -> SizeDistribution:
    """Law of the number of vertices strictly inside the marked chord."""
    _check_n(n)
    norm = total_configurations(n)
    rest = double_factorial(2 * n - 3)
    probs = tuple(Fraction((2 * n - d - 1) * rest, norm) for d in range(2 * n - 1))
    if sum(probs) != 1:
        raise ConsistencyError(f"size distribution for n={n} does not sum to 1")
    return SizeDistribution(n, probs)


# -- crossings -----------------------------------------------------------------


def count_crossings_by_size(n: int, p: int, d: int) -> int:
    """Configurations whose marked chord has size ``d`` and ``p`` crossings.

    Uses the direct product: choose ``p`` inside and ``p`` outside vertices,
    match them, match the rest among themselves, place the marked chord.
    """
    _check_n(n)
    if d < 0 or d > 2 * n - 2 or p < 0:
        return 0
    if (d - p) % 2 or p > min(d, 2 * n - d - 2):
        return 0
    outside = 2 * n - d - 2
    return (
        binomial(d, p)
        * binomial(outside, p)
        * factorial(p)
        * double_factorial(d - p - 1)
        * double_factorial(outside - p - 1)
        * (2 * n - d - 1)
    )


def _crossings_by_size_simplified(n: int, p: int, d: int) -> int:
    # Factorial form after (2k-1)!! = (2k)!/(k! 2^k); the second factorial in
    # the denominator is (n - 1 - (d+p)/2)!, matching the product above.
    num = factorial(d) * factorial(2 * n - d - 1)
    den = factorial(p) * factorial(n - 1 - (d + p) // 2) * factorial((d - p) // 2)
    shift = p - n + 1
    if shift >= 0:
        num <<= shift
    else:
        den <<= -shift
    q, r = divmod(num, den)
    if r:
        raise ConsistencyError(f"non-integral K_{{{n},{p},{d}}}")
    return q


# -- at-least counts (containing / excluded) ----------------------------------


def _containing_at_least_direct(n: int, q: int) -> int:
    rest = double_factorial(2 * n - 2 * q - 3)
    fq = factorial(q)
    total = 0
    for d in range(2 * n - 1 - 2 * q):
        for ell in range(q, 2 * n - d - 1 - q):
            total += binomial(ell, q) * binomial(2 * n - d - ell - 2, q)
    return total * fq * rest


def _containing_at_least_closed(n: int, q: int) -> int:
    # n (2n-1)!! / (q+1) * C(n-1, q) * 2^q (q!)^2 / (2q+1)!
    num = total_configurations(n) * binomial(n - 1, q) * factorial(q) ** 2 << q
    den = (q + 1) * factorial(2 * q + 1)
    value, r = divmod(num, den)
    if r:
        raise ConsistencyError(f"non-integral H_{{{n},{q}}}")
    return value


def _excluded_at_least_direct(n: int, q: int, r: int) -> int:
    inner = double_factorial(2 * q - 1) * double_factorial(2 * r - 1)
    rest = double_factorial(2 * n - 2 * q - 2 * r - 3)
    total = 0
    for d in range(2 * n - 1 - 2 * q - 2 * r):
        for ell in range(2 * q, 2 * n - d - 1 - 2 * r):
            total += binomial(ell, 2 * q) * binomial(2 * n - d - ell - 2, 2 * r)
    return total * inner * rest


def _excluded_at_least_closed(n: int, q: int, r: int) -> int:
    # n (2n-1)!! / (q+r+1) * (n-1)! / (q! r! (n-1-q-r)!) * (2q)! (2r)! / (2q+2r+1)!
    s = q + r
    num = (
        total_configurations(n)
        * factorial(n - 1)
        * factorial(2 * q)
        * factorial(2 * r)
    )
    den = (
        (s + 1)
        * factorial(q)
        * factorial(r)
        * factorial(n - 1 - s)
        * factorial(2 * s + 1)
    )
    value, rem = divmod(num, den)
    if rem:
        raise ConsistencyError(f"non-integral Y_{{{n},{q},{r}}}")
    return value


def at_least_count(
    stat: StatKind | str,
    n: int,
    q: int,
    r: int = 0,
    method: Method | str = Method.CLOSED_FORM,
) -> int:
    """Configurations with at least ``q`` containing chords, or at least ``q``
    excluded chords on the left and ``r`` on the right.

    ``r`` is ignored for the containing statistic.
    """
    stat = StatKind.parse(stat)
    method = Method(method)
    _check_n(n)
    if stat is StatKind.CONTAINING:
        if not 0 <= q <= n - 1:
            raise ValueError(f"q={q} outside [0, {n - 1}]")
        if method is Method.DIRECT_SUM:
            return _containing_at_least_direct(n, q)
        return _containing_at_least_closed(n, q)
    if stat is StatKind.EXCLUDED:
        if q < 0 or r < 0 or q + r > n - 1:
            raise ValueError(f"(q, r)=({q}, {r}) needs q, r >= 0 and q + r <= {n - 1}")
        if method is Method.DIRECT_SUM:
            return _excluded_at_least_direct(n, q, r)
        return _excluded_at_least_closed(n, q, r)
    raise ValueError(f"at-least counts are defined for G and X only, got {stat.symbol}")


@functools.lru_cache(maxsize=256)
def _excluded_at_least_totals(n: int) -> tuple[int, ...]:
    # T_{n,s} = sum over q + r = s of Y_{n,q,r}
    return tuple(
        sum(_excluded_at_least_closed(n, q, s - q) for q in range(s + 1))
        for s in range(n)
    )


@functools.lru_cache(maxsize=256)
def _containing_at_least_row(n: int) -> tuple[int, ...]:
    return tuple(_containing_at_least_closed(n, q) for q in range(n))


def _exactly_from_at_least(at_least: Sequence[int], p: int) -> int:
    # [y^p] F(y - 1) for F(y) = sum_q at_least[q] y^q
    total = 0
    for q in range(p, len(at_least)):
        term = binomial(q, p) * at_least[q]
        total += -term if (q - p) & 1 else term
    return total


# -- exactly-p counts ---------------------------------------------------------


def _check_p(n: int, p: int) -> None:
    if not isinstance(p, int) or isinstance(p, bool):
        raise TypeError(f"p must be an int, got {type(p).__name__}")
    if not 0 <= p <= n - 1:
        raise ValueError(f"p={p} outside [0, {n - 1}]")


def count_stat(stat: StatKind | str, n: int, p: int) -> int:
    """Number of marked diagrams with exactly ``p`` chords in relation ``stat``."""
    stat = StatKind.parse(stat)
    _check_n(n)
    _check_p(n, p)
    if stat is StatKind.CROSSING:
        return sum(count_crossings_by_size(n, p, d) for d in range(p, 2 * n - 1 - p, 2))
    if stat is StatKind.CONTAINED:
        return sum(count_crossings_by_size(n, k, 2 * p + k) for k in range(n - p))
    if stat is StatKind.CONTAINING:
        value = _exactly_from_at_least(_containing_at_least_row(n), p)
    else:
        value = _exactly_from_at_least(_excluded_at_least_totals(n), p)
    if value < 0:
        raise ConsistencyError(f"negative {stat.symbol}_{{{n},{p}}} = {value}")
    return value


def count_row(stat: StatKind | str, n: int) -> CountTable:
    stat = StatKind.parse(stat)
    _check_n(n)
    return CountTable(stat, n, tuple(count_stat(stat, n, p) for p in range(n)))


# -- crossing recursion --------------------------------------------------------


def k_recursion_table(n: int, base_column: Sequence[int]) -> list[CountTable]:
    """Rows ``1..n`` of the crossing table from ``K[m][p] = m K[m-1][p] + m K[m-1][p-1]``.

    ``base_column[m - 1]`` must hold the no-crossing count for ``m`` pairs.
    """
    _check_n(n)
    if len(base_column) < n:
        raise ValueError(f"base column has {len(base_column)} entries, need {n}")
    rows: list[CountTable] = []
    prev: list[int] = []
    for m in range(1, n + 1):
        row = [int(base_column[m - 1])]
        for p in range(1, m):
            above = prev[p] if p < len(prev) else 0
            row.append(m * above + m * prev[p - 1])
        rows.append(CountTable(StatKind.CROSSING, m, tuple(row)))
        prev = row
    return rows


def k_recursion_row(n: int, base_column: Sequence[int]) -> CountTable:
    return k_recursion_table(n, base_column)[-1]
