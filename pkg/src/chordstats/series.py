"""Truncated power series in ``z`` whose coefficients are polynomials in ``y``.

The coefficient ring is Q[y] (exact ``Fraction`` coefficients), truncated
only in ``z``.  Since the ``z**n`` coefficient of every generating function
built here has ``y``-degree at most ``n - 1``, nothing is lost in ``y`` and
division by ``1 - y`` stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

from .errors import ConsistencyError
from .exact import StatKind, factorial

__all__ = [
    "MarkerPolynomial",
    "TruncatedSeries",
    "series_arith",
    "series_elementary",
    "reciprocal",
    "sqrt",
    "log",
    "atan",
    "derivative",
    "integral",
    "divide_by_one_minus_y",
    "build_gf",
    "gf_coefficient",
    "gf_table",
]

Scalar = Union[int, Fraction]
_Poly = tuple  # tuple[Fraction, ...], trailing zeros trimmed

_ZERO: _Poly = ()
_ONE: _Poly = (Fraction(1),)


def _trim(coeffs: Iterable[Scalar]) -> _Poly:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _padd(a: _Poly, b: _Poly) -> _Poly:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _pneg(a: _Poly) -> _Poly:
    return tuple(-c for c in a)


def _psub(a: _Poly, b: _Poly) -> _Poly:
    return _padd(a, _pneg(b))


def _pscale(a: _Poly, s: Fraction) -> _Poly:
    if s == 0:
        return _ZERO
    return tuple(c * s for c in a)


def _pmul(a: _Poly, b: _Poly) -> _Poly:
    if not a or not b:
        return _ZERO
    if len(a) == 1:
        return _pscale(b, a[0])
    if len(b) == 1:
        return _pscale(a, b[0])
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return _trim(out)


def _pdiv_one_minus_y(p: _Poly) -> _Poly:
    if not p:
        return _ZERO
    # p = (1 - y) q  =>  q[k] = p[k] + q[k-1]
    q = []
    acc = Fraction(0)
    for c in p[:-1]:
        acc += c
        q.append(acc)
    remainder = acc + p[-1]
    if remainder != 0:
        raise ConsistencyError(
            f"polynomial {_pformat(p)} is not divisible by (1 - y); remainder {remainder}"
        )
    return _trim(q)


def _pformat(p: _Poly) -> str:
    if not p:
        return "0"
    terms = []
    for k, c in enumerate(p):
        if c == 0:
            continue
        mono = "" if k == 0 else ("y" if k == 1 else f"y^{k}")
        if k and c == 1:
            terms.append(mono)
        elif k and c == -1:
            terms.append(f"-{mono}")
        else:
            terms.append(f"{c}{'*' + mono if mono else ''}")
    return " + ".join(terms).replace("+ -", "- ")


@dataclass(frozen=True)
class MarkerPolynomial:
    """Polynomial in the marker variable ``y`` with exact rational coefficients."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        trimmed = _trim(self.coeffs)
        if trimmed != self.coeffs or any(type(c) is not Fraction for c in self.coeffs):
            object.__setattr__(self, "coeffs", trimmed)

    @classmethod
    def constant(cls, c: Scalar) -> "MarkerPolynomial":
        return cls((Fraction(c),))

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: "MarkerPolynomial") -> "MarkerPolynomial":
        return MarkerPolynomial(_padd(self.coeffs, _as_poly(other)))

    def __sub__(self, other: "MarkerPolynomial") -> "MarkerPolynomial":
        return MarkerPolynomial(_psub(self.coeffs, _as_poly(other)))

    def __mul__(self, other: "MarkerPolynomial | Scalar") -> "MarkerPolynomial":
        return MarkerPolynomial(_pmul(self.coeffs, _as_poly(other)))

    __rmul__ = __mul__

    def __neg__(self) -> "MarkerPolynomial":
        return MarkerPolynomial(_pneg(self.coeffs))

    def __call__(self, y: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def __str__(self) -> str:
        return _pformat(self.coeffs)


def _as_poly(x: "MarkerPolynomial | Scalar | Sequence[Scalar]") -> _Poly:
    if isinstance(x, MarkerPolynomial):
        return x.coeffs
    if isinstance(x, (int, Rational)):
        return _trim((x,))
    return _trim(x)


def divide_by_one_minus_y(p: MarkerPolynomial) -> MarkerPolynomial:
    """Exact quotient ``p / (1 - y)``; raises if ``p(1) != 0``."""
    return MarkerPolynomial(_pdiv_one_minus_y(p.coeffs))


# -- truncated series -----------------------------------------------------------


@dataclass(frozen=True)
class TruncatedSeries:
    """``sum_{k <= order} coeffs[k] z**k`` with ``coeffs[k]`` in Q[y]."""

    order: int
    coeffs: tuple[_Poly, ...]

    def __post_init__(self) -> None:
        if self.order < 0:
            raise ValueError(f"truncation order must be >= 0, got {self.order}")
        if len(self.coeffs) != self.order + 1:
            raise ValueError(
                f"series of order {self.order} needs {self.order + 1} coefficients, "
                f"got {len(self.coeffs)}"
            )

    @classmethod
    def from_coeffs(
        cls, order: int, coeffs: Sequence["MarkerPolynomial | Scalar | Sequence[Scalar]"]
    ) -> "TruncatedSeries":
        """Build from leading ``z`` coefficients; missing ones are zero, extra
        ones beyond ``order`` are dropped."""
        polys = [_as_poly(c) for c in coeffs[: order + 1]]
        polys.extend([_ZERO] * (order + 1 - len(polys)))
        return cls(order, tuple(polys))

    @classmethod
    def constant(cls, order: int, c: "MarkerPolynomial | Scalar" = 1) -> "TruncatedSeries":
        return cls.from_coeffs(order, [c])

    @classmethod
    def z(cls, order: int) -> "TruncatedSeries":
        return cls.from_coeffs(order, [0, 1])

    def __getitem__(self, k: int) -> MarkerPolynomial:
        if not 0 <= k <= self.order:
            raise IndexError(f"z^{k} outside truncation order {self.order}")
        return MarkerPolynomial(self.coeffs[k])

    def coefficient(self, n: int, p: int) -> Fraction:
        """Coefficient of ``y**p z**n``."""
        poly = self[n].coeffs
        return poly[p] if 0 <= p < len(poly) else Fraction(0)

    def at_y_zero(self) -> list[Fraction]:
        return [c[0] if c else Fraction(0) for c in self.coeffs]

    def map_coeffs(self, fn) -> "TruncatedSeries":
        return TruncatedSeries(self.order, tuple(fn(c) for c in self.coeffs))

    def _check_order(self, other: "TruncatedSeries") -> None:
        if self.order != other.order:
            raise ValueError(
                f"truncation order mismatch: {self.order} vs {other.order}"
            )

    def __add__(self, other):
        return series_arith("add", self, other)

    def __radd__(self, other):
        return series_arith("add", self, other)

    def __sub__(self, other):
        return series_arith("sub", self, other)

    def __rsub__(self, other):
        return series_arith("sub", _lift(other, self.order), self)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_arith("mul", self, other)
        return series_arith("scale", self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return series_arith("scale", self, -1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                body = _pformat(c)
                terms.append(f"({body})" + ("" if k == 0 else f"*z^{k}"))
        return " + ".join(terms) + f" + O(z^{self.order + 1})" if terms else f"O(z^{self.order + 1})"


def _lift(x, order: int) -> TruncatedSeries:
    if isinstance(x, TruncatedSeries):
        return x
    return TruncatedSeries.constant(order, x)


def _mul_lists(a: Sequence[_Poly], b: Sequence[_Poly], n_terms: int) -> list[_Poly]:
    out: list[_Poly] = []
    for k in range(n_terms):
        acc = _ZERO
        for i in range(k + 1):
            if a[i] and b[k - i]:
                acc = _padd(acc, _pmul(a[i], b[k - i]))
        out.append(acc)
    return out


def series_arith(op: str, a: TruncatedSeries, b) -> TruncatedSeries:
    """``add``, ``sub``, ``mul`` of two series of equal order, or ``scale`` by a
    rational / marker polynomial.  Scalars given to add/sub act as constants."""
    if op == "scale":
        if isinstance(b, TruncatedSeries):
            raise TypeError("scale takes a scalar or MarkerPolynomial, not a series")
        s = _as_poly(b)
        return TruncatedSeries(a.order, tuple(_pmul(c, s) for c in a.coeffs))
    b = _lift(b, a.order)
    a._check_order(b)
    if op == "add":
        return TruncatedSeries(a.order, tuple(_padd(x, y) for x, y in zip(a.coeffs, b.coeffs)))
    if op == "sub":
        return TruncatedSeries(a.order, tuple(_psub(x, y) for x, y in zip(a.coeffs, b.coeffs)))
    if op == "mul":
        return TruncatedSeries(a.order, tuple(_mul_lists(a.coeffs, b.coeffs, a.order + 1)))
    raise ValueError(f"unknown series operation {op!r}")


# -- elementary functions ---------------------------------------------------------


def _reciprocal_list(a: Sequence[_Poly], n_terms: int) -> list[_Poly]:
    a0 = a[0]
    if len(a0) != 1:
        raise ValueError(
            f"reciprocal needs an invertible constant term, got {_pformat(a0)}"
        )
    inv0 = 1 / a0[0]
    out: list[_Poly] = [(inv0,)]
    for k in range(1, n_terms):
        acc = _ZERO
        for i in range(1, k + 1):
            if a[i] and out[k - i]:
                acc = _padd(acc, _pmul(a[i], out[k - i]))
        out.append(_pscale(acc, -inv0))
    return out


def _derivative_list(a: Sequence[_Poly]) -> list[_Poly]:
    return [_pscale(a[k], Fraction(k)) for k in range(1, len(a))]


def _integral_list(a: Sequence[_Poly]) -> list[_Poly]:
    return [_ZERO] + [_pscale(c, Fraction(1, k + 1)) for k, c in enumerate(a)]


def _require_unit_constant(s: TruncatedSeries, name: str) -> None:
    if s.coeffs[0] != _ONE:
        raise ValueError(f"{name} needs constant term 1, got {_pformat(s.coeffs[0])}")


def reciprocal(s: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(s.order, tuple(_reciprocal_list(s.coeffs, s.order + 1)))


def sqrt(s: TruncatedSeries) -> TruncatedSeries:
    _require_unit_constant(s, "sqrt")
    out: list[_Poly] = [_ONE]
    half = Fraction(1, 2)
    for k in range(1, s.order + 1):
        acc = s.coeffs[k]
        for i in range(1, k):
            if out[i] and out[k - i]:
                acc = _psub(acc, _pmul(out[i], out[k - i]))
        out.append(_pscale(acc, half))
    return TruncatedSeries(s.order, tuple(out))


def derivative(s: TruncatedSeries) -> TruncatedSeries:
    """d/dz; the result is one order shorter."""
    if s.order == 0:
        raise ValueError("derivative of an order-0 series has no retained terms")
    return TruncatedSeries(s.order - 1, tuple(_derivative_list(s.coeffs)))


def integral(s: TruncatedSeries) -> TruncatedSeries:
    """Antiderivative with zero constant term; one order longer."""
    return TruncatedSeries(s.order + 1, tuple(_integral_list(s.coeffs)))


def log(s: TruncatedSeries) -> TruncatedSeries:
    _require_unit_constant(s, "log")
    if s.order == 0:
        return TruncatedSeries.constant(0, 0)
    d = _derivative_list(s.coeffs)
    inv = _reciprocal_list(s.coeffs, s.order)
    return TruncatedSeries(s.order, tuple(_integral_list(_mul_lists(d, inv, s.order))))


def atan(s: TruncatedSeries) -> TruncatedSeries:
    """Arctangent via ``atan(w) = integral of w' / (1 + w**2)``."""
    if s.coeffs[0]:
        raise ValueError(f"atan needs constant term 0, got {_pformat(s.coeffs[0])}")
    if s.order == 0:
        return TruncatedSeries.constant(0, 0)
    m = s.order
    d = _derivative_list(s.coeffs)
    one_plus_sq = _mul_lists(s.coeffs, s.coeffs, m)
    one_plus_sq[0] = _padd(one_plus_sq[0], _ONE)
    inv = _reciprocal_list(one_plus_sq, m)
    return TruncatedSeries(m, tuple(_integral_list(_mul_lists(d, inv, m))))


_ELEMENTARY = {"reciprocal": reciprocal, "sqrt": sqrt, "log": log, "atan": atan}


def series_elementary(op: str, s: TruncatedSeries) -> TruncatedSeries:
    try:
        fn = _ELEMENTARY[op]
    except KeyError:
        raise ValueError(f"unknown elementary function {op!r}") from None
    return fn(s)


# -- generating functions ---------------------------------------------------------


def _one_minus(order: int, *coeff_of_z: Scalar) -> TruncatedSeries:
    """``1 - z * (c0 + c1 y + ...)``."""
    return TruncatedSeries.from_coeffs(order, [1, [-c for c in coeff_of_z]])


def _divide_each_by_one_minus_y(s: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(s.order, tuple(_pdiv_one_minus_y(c) for c in s.coeffs))


def _inv_sqrt_one_minus_2z(order: int) -> TruncatedSeries:
    return reciprocal(sqrt(_one_minus(order, 2)))


def build_gf(stat: StatKind | str, order: int) -> TruncatedSeries:
    """Exponential generating function ``sum_{n,p} N_{n,p} y^p z^n / n!``
    for the chosen statistic, truncated after ``z**order``."""
    stat = StatKind.parse(stat)
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    z = TruncatedSeries.z(order)
    rsqrt = _inv_sqrt_one_minus_2z(order)
    if stat is StatKind.CROSSING:
        gf = z * rsqrt * reciprocal(_one_minus(order, 1, 1))
    elif stat is StatKind.CONTAINED:
        numer = sqrt(_one_minus(order, 0, 2)) - sqrt(_one_minus(order, 2))
        gf = _divide_each_by_one_minus_y(numer) * reciprocal(_one_minus(order, 2))
    elif stat is StatKind.CONTAINING:
        ratio_log = log(_one_minus(order, 1, 1)) - log(_one_minus(order, 2))
        gf = _divide_each_by_one_minus_y(ratio_log) * rsqrt
    else:
        # w = (1 - y) z / sqrt((1 - 2z)(1 - 2yz))
        radicand = _one_minus(order, 2) * _one_minus(order, 0, 2)
        w = TruncatedSeries.from_coeffs(order, [0, [1, -1]]) * reciprocal(sqrt(radicand))
        gf = _divide_each_by_one_minus_y(atan(w)) * rsqrt
    _check_marker_degrees(gf, stat)
    return gf


def _check_marker_degrees(gf: TruncatedSeries, stat: StatKind) -> None:
    if gf.coeffs[0]:
        raise ConsistencyError(f"{stat.symbol} generating function has a z^0 term")
    for n in range(1, gf.order + 1):
        deg = len(gf.coeffs[n]) - 1
        if deg > n - 1:
            raise ConsistencyError(
                f"{stat.symbol}: z^{n} coefficient has y-degree {deg} > {n - 1}"
            )


def _integral_count(gf: TruncatedSeries, stat: StatKind, n: int, p: int) -> int:
    value = gf.coefficient(n, p) * factorial(n)
    if value.denominator != 1:
        raise ConsistencyError(f"{stat.symbol}: n! [y^{p} z^{n}] = {value} is not an integer")
    if value < 0:
        raise ConsistencyError(f"{stat.symbol}: n! [y^{p} z^{n}] = {value} is negative")
    return value.numerator


def gf_coefficient(
    stat: StatKind | str, n: int, p: int, gf: TruncatedSeries | None = None
) -> int:
    """``n! [y^p z^n]`` of the statistic's generating function.

    Pass a prebuilt ``gf`` (from :func:`build_gf`) to amortize construction
    across many lookups; otherwise one of order ``n`` is built.
    """
    stat = StatKind.parse(stat)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= p <= n - 1:
        raise ValueError(f"p={p} outside [0, {n - 1}]")
    if gf is None:
        gf = build_gf(stat, n)
    elif n > gf.order:
        raise ValueError(f"z^{n} requested from a series truncated at order {gf.order}")
    return _integral_count(gf, stat, n, p)


def gf_table(stat: StatKind | str, order: int) -> list[list[int]]:
    """Rows ``n = 1..order`` of integer counts read off the generating function."""
    stat = StatKind.parse(stat)
    gf = build_gf(stat, order)
    return [[_integral_count(gf, stat, n, p) for p in range(n)] for n in range(1, order + 1)]
