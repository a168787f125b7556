"""Exact distributions and moments, limiting densities and CDFs, and the
finite-``n`` Normal-mixture approximation.

This is the only module that uses floating point.  Exact quantities stay
``Fraction``; approximate ones are ``float`` (or ``mpmath.mpf`` inside the
high-precision checks) and every comparison states its tolerance.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
from scipy import integrate

from .errors import ConsistencyError, QuadratureError
from .exact import StatKind, binomial, count_row, double_factorial, factorial, total_configurations

__all__ = [
    "ExactDistribution",
    "MomentReport",
    "AsymptoticEval",
    "IBPReport",
    "ConvergenceRow",
    "exact_distribution",
    "factorial_moment",
    "factorial_moment_direct",
    "excluded_moment_integral",
    "asymptotic_moment",
    "mean_variance",
    "asymptotic_density",
    "asymptotic_cdf",
    "asymptotic_eval",
    "asymptotic_moment_numeric",
    "normal_approx_density",
    "ibp_moment_identity_check",
    "convergence_table",
    "nearest_index",
]

CRITICAL_X = 0.5


@dataclass(frozen=True)
class ExactDistribution:
    stat: StatKind
    n: int
    probs: tuple[Fraction, ...]

    def scaled(self, p: int) -> float:
        """``(n - 1) * P(p)``, the discrete analogue of the limiting density."""
        return (self.n - 1) * float(self.probs[p])

    def moment(self, m: int) -> Fraction:
        return sum((Fraction(p**m) * q for p, q in enumerate(self.probs)), Fraction(0))


@dataclass(frozen=True)
class MomentReport:
    stat: StatKind
    n: int
    m: int
    factorial_moment: Fraction
    mean: Fraction
    variance: Fraction


@dataclass(frozen=True)
class AsymptoticEval:
    stat: StatKind
    x: float
    density: float  # math.inf at the divergent endpoints of C and G
    cdf: float


@functools.lru_cache(maxsize=512)
def exact_distribution(stat: StatKind | str, n: int) -> ExactDistribution:
    stat = StatKind.parse(stat)
    row = count_row(stat, n)
    norm = total_configurations(n)
    probs = tuple(Fraction(c, norm) for c in row.counts)
    if sum(probs) != 1:
        raise ConsistencyError(f"{stat.symbol} distribution for n={n} does not sum to 1")
    return ExactDistribution(stat, n, probs)


# -- moments -----------------------------------------------------------------------------


def _falling(a: int, m: int) -> int:
    out = 1
    for i in range(m):
        out *= a - i
    return out


def excluded_moment_integral(m: int) -> Fraction:
    """Exact value of the integral of ``x**m / sqrt(2x - 1)`` over ``[1/2, 1]``,
    ``2**-m * sum_k C(m, k) / (2k + 1)`` (substitute ``u = sqrt(2x - 1)``)."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    return sum((Fraction(binomial(m, k), 2 * k + 1) for k in range(m + 1)), Fraction(0)) / 2**m


def asymptotic_moment(stat: StatKind | str, m: int) -> Fraction:
    """``m``-th moment of the limiting density, exactly."""
    stat = StatKind.parse(stat)
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if stat is StatKind.CROSSING:
        return Fraction(factorial(m), double_factorial(2 * m + 1))
    if stat is StatKind.CONTAINED:
        return Fraction(1, (m + 1) * (2 * m + 1))
    if stat is StatKind.CONTAINING:
        return Fraction(factorial(m), (m + 1) * double_factorial(2 * m + 1))
    return excluded_moment_integral(m) / (m + 1)


def factorial_moment(stat: StatKind | str, n: int, m: int) -> Fraction:
    """``E[P (P-1) ... (P-m+1)]`` from the closed forms: the falling factorial
    ``(n-1)_m`` times the limiting ``m``-th moment."""
    stat = StatKind.parse(stat)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if m < 0:
        raise ValueError(f"moment order must be >= 0, got {m}")
    # (n-1)_m vanishes for m > n - 1, as does every term of the direct sum
    return _falling(n - 1, m) * asymptotic_moment(stat, m)


def factorial_moment_direct(stat: StatKind | str, n: int, m: int) -> Fraction:
    """Same quantity by summing over the exact distribution."""
    dist = exact_distribution(stat, n)
    return sum(
        (_falling(p, m) * q for p, q in enumerate(dist.probs) if p >= m), Fraction(0)
    )


_MEAN = {
    StatKind.CROSSING: Fraction(1, 3),
    StatKind.CONTAINED: Fraction(1, 6),
    StatKind.CONTAINING: Fraction(1, 6),
    StatKind.EXCLUDED: Fraction(1, 3),
}


def _variance_closed(stat: StatKind, n: int) -> Fraction:
    if stat is StatKind.CROSSING:
        return Fraction((n - 1) * (n + 8), 45)
    if stat is StatKind.CONTAINED:
        return Fraction((n - 1) * (7 * n + 11), 180)
    if stat is StatKind.CONTAINING:
        return Fraction((n - 1) * (3 * n + 19), 180)
    return Fraction(2 * (n - 1) * (n + 3), 45)


def mean_variance(stat: StatKind | str, n: int, m: int = 1) -> MomentReport:
    """Closed-form mean and variance, plus the ``m``-th factorial moment.

    The closed forms are checked against the factorial moments
    (``Var = F2 + F1 - F1**2``) before returning.
    """
    stat = StatKind.parse(stat)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    mean = (n - 1) * _MEAN[stat]
    var = _variance_closed(stat, n)
    f1 = factorial_moment(stat, n, 1)
    f2 = factorial_moment(stat, n, 2)
    if f1 != mean or f2 + f1 - f1 * f1 != var:
        raise ConsistencyError(f"{stat.symbol} mean/variance closed forms disagree at n={n}")
    return MomentReport(stat, n, m, factorial_moment(stat, n, m), mean, var)


# -- limiting densities -------------------------------------------------------------------


def _check_unit(x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0 or math.isnan(x):
        raise ValueError(f"x={x} outside [0, 1]")
    return x


def asymptotic_density(stat: StatKind | str, x: float) -> float:
    """Limiting density of ``p / (n - 1)``.

    Returns ``math.inf`` where the density diverges (C and G at ``x = 0``).
    At ``x = 1/2``: K is 0, G is 0, X is ``pi/2``.
    """
    stat = StatKind.parse(stat)
    x = _check_unit(x)
    if stat is StatKind.CROSSING:
        return 1.0 / math.sqrt(1.0 - 2.0 * x) if x < CRITICAL_X else 0.0
    if stat is StatKind.CONTAINED:
        return math.inf if x == 0.0 else 1.0 / math.sqrt(x) - 1.0
    if stat is StatKind.CONTAINING:
        if x == 0.0:
            return math.inf
        return 2.0 * math.atanh(math.sqrt(1.0 - 2.0 * x)) if x <= CRITICAL_X else 0.0
    if x < CRITICAL_X:
        return math.pi / 2
    return math.pi / 2 - 2.0 * math.atan(math.sqrt(2.0 * x - 1.0))


def asymptotic_cdf(stat: StatKind | str, x: float) -> float:
    """Closed-form antiderivative of :func:`asymptotic_density` from 0 to ``x``."""
    stat = StatKind.parse(stat)
    x = _check_unit(x)
    if stat is StatKind.CROSSING:
        return 1.0 - math.sqrt(1.0 - 2.0 * x) if x < CRITICAL_X else 1.0
    if stat is StatKind.CONTAINED:
        return 2.0 * math.sqrt(x) - x
    if stat is StatKind.CONTAINING:
        if x >= CRITICAL_X:
            return 1.0
        if x == 0.0:
            return 0.0
        u = math.sqrt(1.0 - 2.0 * x)
        return 1.0 + 2.0 * x * math.atanh(u) - u
    if x <= CRITICAL_X:
        return math.pi / 2 * x
    u = math.sqrt(2.0 * x - 1.0)
    return math.pi / 4 + math.pi / 2 * (x - 0.5) - 2.0 * x * math.atan(u) + u


def asymptotic_eval(stat: StatKind | str, x: float) -> AsymptoticEval:
    stat = StatKind.parse(stat)
    return AsymptoticEval(stat, float(x), asymptotic_density(stat, x), asymptotic_cdf(stat, x))


# High-precision versions for quadrature checks.
def _density_mp(stat: StatKind, x):
    if stat is StatKind.CROSSING:
        return 1 / mpmath.sqrt(1 - 2 * x) if x < 0.5 else mpmath.mpf(0)
    if stat is StatKind.CONTAINED:
        return 1 / mpmath.sqrt(x) - 1
    if stat is StatKind.CONTAINING:
        return 2 * mpmath.atanh(mpmath.sqrt(1 - 2 * x)) if x <= 0.5 else mpmath.mpf(0)
    if x < 0.5:
        return mpmath.pi / 2
    return mpmath.pi / 2 - 2 * mpmath.atan(mpmath.sqrt(2 * x - 1))


def _support_breaks(stat: StatKind) -> list:
    half = mpmath.mpf(1) / 2
    if stat in (StatKind.CROSSING, StatKind.CONTAINING):
        return [0, half]
    if stat is StatKind.EXCLUDED:
        return [0, half, 1]
    return [0, 1]


def asymptotic_moment_numeric(stat: StatKind | str, m: int, dps: int = 30) -> float:
    """``integral x**m * density(x) dx`` over the support, by tanh-sinh quadrature
    (no endpoint evaluations), split at ``x = 1/2``."""
    stat = StatKind.parse(stat)
    with mpmath.workdps(dps):
        val = mpmath.quad(lambda t: t**m * _density_mp(stat, t), _support_breaks(stat))
        return float(val)


# -- Normal-mixture approximation ---------------------------------------------------------


def _quad(fn, a: float, b: float, points: Sequence[float], tol: float) -> float:
    pts = sorted(p for p in points if a < p < b)
    res = integrate.quad(
        fn, a, b, points=pts or None, epsabs=tol, epsrel=0.0, limit=500, full_output=1
    )
    value, err = res[0], res[1]
    # a fourth element (warning message) means QUADPACK flagged ier > 0
    if len(res) > 3 or err > tol:
        raise QuadratureError("Normal-approximation integral did not converge", err)
    return value


def normal_approx_density(stat: StatKind | str, n: int, x: float, tol: float = 1e-9) -> float:
    """Finite-``n`` interpolation of ``(n-1) P(p)`` at ``x = p/(n-1)``: the exact
    law is a mixture of binomials, each replaced by a Normal with the same mean
    and variance, and the mixing integral done by adaptive Gauss-Kronrod."""
    stat = StatKind.parse(stat)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    x = _check_unit(x)
    nm1 = n - 1
    if stat is StatKind.CROSSING:
        pref = math.sqrt(nm1 / (2.0 * math.pi))

        def integrand(theta: float) -> float:
            s = math.sin(theta)
            c2 = math.cos(theta) ** 2
            s2 = s * s
            # 1 - cos^4 = sin^2 (1 + cos^2)
            expo = -2.0 * nm1 * (x - 0.5 * s2) ** 2 / (s2 * (1.0 + c2))
            return pref / math.sqrt(1.0 + c2) * math.exp(expo)

        peaks = [math.pi / 2]
        if x < 0.5:
            t0 = math.asin(math.sqrt(2.0 * x))
            peaks += [t0, math.pi - t0]
        return _quad(integrand, 0.0, math.pi, peaks, tol)
    if stat is StatKind.CONTAINED:
        pref = math.sqrt(nm1 / (2.0 * math.pi))

        def integrand(a: float) -> float:
            a2 = a * a
            var = a2 * (1.0 - a2)
            return pref * 2.0 * (1.0 - a) / math.sqrt(var) * math.exp(-nm1 * (x - a2) ** 2 / (2.0 * var))

        return _quad(integrand, 0.0, 1.0, [math.sqrt(x)], tol)
    raise ValueError(f"Normal approximation is defined for K and C only, got {stat.symbol}")


# -- integration-by-parts moment identities ----------------------------------------------


@dataclass(frozen=True)
class IBPReport:
    m: int
    tolerance: float
    containing_moment: float  # integral x^m G(x)
    crossing_dressed: float  # integral x^m K(x) / (m + 1)
    containing_exact: Fraction
    excluded_moment: float  # integral x^m X(x)
    excluded_dressed: float  # I_m / (m + 1) by quadrature
    excluded_exact: Fraction

    @property
    def max_error(self) -> float:
        g = float(self.containing_exact)
        x = float(self.excluded_exact)
        return max(
            abs(self.containing_moment - g),
            abs(self.crossing_dressed - g),
            abs(self.excluded_moment - x),
            abs(self.excluded_dressed - x),
        )

    @property
    def ok(self) -> bool:
        return self.max_error <= self.tolerance


def ibp_moment_identity_check(m: int, tolerance: float = 1e-12, dps: int = 30) -> IBPReport:
    """Check that G's moments are K's divided by ``m + 1`` and X's are those of
    ``(2x - 1)**-1/2`` on ``[1/2, 1]`` divided by ``m + 1``, by quadrature."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    with mpmath.workdps(dps):
        half = mpmath.mpf(1) / 2
        g_mom = mpmath.quad(lambda t: t**m * _density_mp(StatKind.CONTAINING, t), [0, half])
        k_mom = mpmath.quad(lambda t: t**m * _density_mp(StatKind.CROSSING, t), [0, half])
        x_mom = mpmath.quad(lambda t: t**m * _density_mp(StatKind.EXCLUDED, t), [0, half, 1])
        i_m = mpmath.quad(lambda t: t**m / mpmath.sqrt(2 * t - 1), [half, 1])
        report = IBPReport(
            m=m,
            tolerance=tolerance,
            containing_moment=float(g_mom),
            crossing_dressed=float(k_mom / (m + 1)),
            containing_exact=asymptotic_moment(StatKind.CONTAINING, m),
            excluded_moment=float(x_mom),
            excluded_dressed=float(i_m / (m + 1)),
            excluded_exact=asymptotic_moment(StatKind.EXCLUDED, m),
        )
    if not report.ok:
        raise ConsistencyError(
            f"moment identity violated at m={m}: max error {report.max_error:.3e} > {tolerance:.1e}"
        )
    return report


# -- finite-n convergence ---------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    x: float
    p: int
    exact_scaled: float
    asymptotic: float
    abs_error: float


def nearest_index(n: int, x: float) -> int:
    """``round((n - 1) x)`` with halves rounded up."""
    return int(math.floor((n - 1) * x + 0.5))


def convergence_table(stat: StatKind | str, n: int, grid: Iterable[float]) -> list[ConvergenceRow]:
    """Exact ``(n-1) P(p)`` at ``p = round((n-1) x)`` against the limiting
    density at ``p / (n-1)``."""
    stat = StatKind.parse(stat)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    dist = exact_distribution(stat, n)
    rows = []
    for x in grid:
        x = _check_unit(x)
        p = nearest_index(n, x)
        exact_scaled = dist.scaled(p)
        asym = asymptotic_density(stat, p / (n - 1))
        rows.append(ConvergenceRow(x, p, exact_scaled, asym, abs(exact_scaled - asym)))
    return rows
