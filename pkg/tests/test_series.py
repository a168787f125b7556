from fractions import Fraction

import pytest

from chordstats import exact
from chordstats.errors import ConsistencyError
from chordstats.series import (
    MarkerPolynomial,
    TruncatedSeries,
    atan,
    build_gf,
    derivative,
    divide_by_one_minus_y,
    gf_coefficient,
    gf_table,
    integral,
    log,
    reciprocal,
    series_arith,
    series_elementary,
    sqrt,
)

ORDER = 12


def poly(*c):
    return MarkerPolynomial(tuple(Fraction(v) for v in c))


def one_minus(order, *c):
    return TruncatedSeries.from_coeffs(order, [1, [-v for v in c]])


@pytest.fixture(scope="module")
def gfs():
    return {stat: build_gf(stat, 40) for stat in "KCGX"}


# -- marker polynomials --------------------------------------------------------------


def test_marker_polynomial_trims_and_evaluates():
    p = poly(1, 2, 0, 0)
    assert p.coeffs == (Fraction(1), Fraction(2))
    assert p.degree == 1
    assert p(Fraction(1, 2)) == 2
    assert poly().degree == -1 and not poly()


@pytest.mark.parametrize(
    "numer, quotient",
    [((1, -1), (1,)), ((1, 0, -1), (1, 1)), ((Fraction(1, 2), 0, Fraction(-1, 2)), (Fraction(1, 2), Fraction(1, 2)))],
)
def test_divide_by_one_minus_y(numer, quotient):
    assert divide_by_one_minus_y(poly(*numer)) == poly(*quotient)


def test_divide_by_one_minus_y_rejects_remainder():
    with pytest.raises(ConsistencyError):
        divide_by_one_minus_y(poly(1, 1))


def test_contained_numerator_coefficient_divides_cleanly():
    numer = sqrt(one_minus(2, 0, 2)) - sqrt(one_minus(2, 2))
    assert numer[2] == poly(Fraction(1, 2), 0, Fraction(-1, 2))
    assert divide_by_one_minus_y(numer[2]) == poly(Fraction(1, 2), Fraction(1, 2))


# -- arithmetic --------------------------------------------------------------------------


def test_product_with_reciprocal_is_one():
    s = one_minus(ORDER, 2)
    assert s * reciprocal(s) == TruncatedSeries.constant(ORDER, 1)


def test_scale_by_minus_one():
    s = one_minus(ORDER, 1, 1)
    out = series_arith("scale", s, -1)
    assert out == TruncatedSeries.from_coeffs(ORDER, [-1, [1, 1]])


def test_add_sub_scalars_and_series():
    s = one_minus(ORDER, 2)
    assert series_arith("add", s, 1)[0] == poly(2)
    assert (s - s) == TruncatedSeries.constant(ORDER, 0)
    assert series_arith("sub", s, s) == s - s


def test_mismatched_orders_rejected():
    with pytest.raises(ValueError):
        one_minus(4, 2) + one_minus(5, 2)
    with pytest.raises(ValueError):
        series_arith("pow", one_minus(4, 2), one_minus(4, 2))
    with pytest.raises(TypeError):
        series_arith("scale", one_minus(4, 2), one_minus(4, 2))


def test_series_validates_length():
    with pytest.raises(ValueError):
        TruncatedSeries(3, (poly(1),))
    with pytest.raises(IndexError):
        TruncatedSeries.z(3)[4]


# -- elementary functions ------------------------------------------------------------------


def test_sqrt_binomial_series():
    s = sqrt(one_minus(ORDER, 2)).at_y_zero()
    assert s[:4] == [1, -1, Fraction(-1, 2), Fraction(-1, 2)]
    assert s[4] == Fraction(-5, 8)


def test_log_mercator():
    s = log(reciprocal(one_minus(ORDER, 2))).at_y_zero()
    assert s[0] == 0
    assert all(s[k] == Fraction(2**k, k) for k in range(1, ORDER + 1))


def test_atan_of_z():
    s = atan(TruncatedSeries.z(7)).at_y_zero()
    assert s == [0, 1, 0, Fraction(-1, 3), 0, Fraction(1, 5), 0, Fraction(-1, 7)]


def test_elementary_dispatch_and_domain_errors():
    s = one_minus(ORDER, 2)
    assert series_elementary("sqrt", s) == sqrt(s)
    with pytest.raises(ValueError):
        series_elementary("exp", s)
    with pytest.raises(ValueError):
        sqrt(TruncatedSeries.from_coeffs(3, [4, 1]))
    with pytest.raises(ValueError):
        log(TruncatedSeries.from_coeffs(3, [0, 1]))
    with pytest.raises(ValueError):
        atan(one_minus(3, 1))
    with pytest.raises(ValueError):
        reciprocal(TruncatedSeries.from_coeffs(3, [[1, 1], 1]))


def test_derivative_and_integral_change_order():
    s = reciprocal(one_minus(6, 1, 1))
    assert integral(derivative(s)) == s - TruncatedSeries.constant(6, 1)
    assert derivative(integral(s)) == s


# -- algebraic identities at order 40 ---------------------------------------------------------


@pytest.mark.parametrize("radicand", [(2,), (0, 2), (1, 1)])
def test_sqrt_squared_is_identity(radicand):
    s = one_minus(40, *radicand)
    r = sqrt(s)
    assert r * r == s


def test_log_of_ratio_is_difference_of_logs():
    a = one_minus(40, 1, 1)
    b = one_minus(40, 2)
    assert log(a * reciprocal(b)) == log(a) - log(b)


def test_atan_derivative_identity():
    radicand = one_minus(40, 2) * one_minus(40, 0, 2)
    w = TruncatedSeries.from_coeffs(40, [0, [1, -1]]) * reciprocal(sqrt(radicand))
    lhs = derivative(atan(w)) * (TruncatedSeries.constant(39, 1) + _drop_last(w) * _drop_last(w))
    assert lhs == derivative(w)


def _drop_last(s):
    return TruncatedSeries(s.order - 1, s.coeffs[:-1])


# -- generating functions -----------------------------------------------------------------------


def test_crossing_gf_second_coefficient():
    assert build_gf("K", 4)[2] == poly(2, 1)


@pytest.mark.parametrize("stat, n, p, expected", [("C", 4, 3, 15), ("X", 6, 5, 2190), ("K", 5, 0, 1245)])
def test_gf_coefficient_examples(stat, n, p, expected):
    assert gf_coefficient(stat, n, p) == expected


def test_gf_coefficient_reuses_prebuilt_series(gfs):
    assert gf_coefficient("K", 6, 2, gf=gfs["K"]) == 16560
    with pytest.raises(ValueError):
        gf_coefficient("K", 41, 0, gf=gfs["K"])
    with pytest.raises(ValueError):
        gf_coefficient("K", 4, 4)
    with pytest.raises(ValueError):
        build_gf("K", 0)


@pytest.mark.parametrize("stat", "KCGX")
def test_route_equivalence_to_40(stat, gfs):
    gf = gfs[stat]
    for n in range(1, 41):
        row = [gf_coefficient(stat, n, p, gf=gf) for p in range(n)]
        assert row == list(exact.count_row(stat, n).counts)


@pytest.mark.parametrize("stat", "KCGX")
def test_marker_degree_bound(stat, gfs):
    gf = gfs[stat]
    assert not gf[0]
    assert all(gf[n].degree <= n - 1 for n in range(1, 41))


@pytest.mark.parametrize("stat", "KCGX")
def test_gf_table_matches_printed_tables(stat, printed_tables):
    assert gf_table(stat, 6) == printed_tables[stat]


def test_crossing_base_column_strong_fixed_points(gfs):
    base = [gf_coefficient("K", n, 0, gf=gfs["K"]) for n in range(1, 7)]
    assert base == [1, 4, 21, 144, 1245, 13140]
    univariate = TruncatedSeries.z(6) * reciprocal(sqrt(one_minus(6, 2))) * reciprocal(one_minus(6, 1))
    assert [c * exact.factorial(n) for n, c in enumerate(univariate.at_y_zero())][1:] == base
