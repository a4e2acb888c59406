from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from mapforge.series_core import (
    BadConstantTerm, NonUnitDivisor, NotContracting, NotInvertible,
    SymbolPoly, TruncSeries, fixed_point_solve, rat_parse, rat_str,
)


def S(coeffs, var="g"):
    return TruncSeries(var, coeffs)


def test_mul_difference_of_squares():
    assert S([1, 1]) * S([1, -1]) == S([1, 0])
    assert (S([1, 1, 0]) * S([1, -1, 0])).coeffs == [1, 0, -1]


def test_geometric_series():
    one = TruncSeries.const("g", 1, 6)
    inv = one / S([1, -1, 0, 0, 0, 0, 0])
    assert inv.coeffs == [1] * 7


def test_square_by_hand():
    sq = S([1, 3, 18]) ** 2
    assert sq.coeffs == [1, 6, 45]


def test_min_order_truncation():
    a = S([1, 2, 3, 4])
    b = S([1, 1])
    assert (a + b).order == 1
    assert (a * b).order == 1


def test_div_nonunit_raises():
    with pytest.raises(NonUnitDivisor):
        S([0, 1, 2]) / S([0, 1, 1])


def test_sqrt_of_1_minus_12g():
    s = S([1, -12, 0, 0]).sqrt()
    assert s.coeffs == [1, -6, -18, -108]


def test_log_cases():
    assert TruncSeries.const("g", 1, 5).log().is_zero()
    lg = S([1, 3, 18, 135]).log()
    assert lg.coeffs == [0, 3, F(27, 2), 90]


def test_elementary_bad_constant():
    with pytest.raises(BadConstantTerm):
        S([2, 1]).log()
    with pytest.raises(BadConstantTerm):
        S([1, 1]).exp()


def test_compose():
    outer = S([1, 1, 1], var="x")
    inner = TruncSeries.gen("g", 2)
    assert outer.compose(inner).coeffs == [1, 1, 1]
    outer2 = S([0, 1, F(-1, 2)], var="x")
    inner2 = S([0, 2, 0])
    assert outer2.compose(inner2).coeffs == [0, 2, -2]
    with pytest.raises(BadConstantTerm):
        outer.compose(S([1, 1]))


def test_compose_log_exp_inverse():
    g = TruncSeries.gen("g", 8)
    em1 = g.exp() - 1
    lg = S([1, 1], var="x").truncate(8).log()   # log(1+x) as outer
    assert lg.compose(em1) == g


def test_reversion_catalan():
    a = S([0, 1, -1, 0, 0], var="z")
    b = a.reversion()
    assert b.coeffs == [0, 1, 1, 2, 5]
    assert a.compose(b) == TruncSeries.gen("z", 4)


def test_reversion_identity_and_errors():
    z = TruncSeries.gen("z", 5)
    assert z.reversion() == z
    with pytest.raises(NotInvertible):
        S([1, 1], var="z").reversion()
    with pytest.raises(NotInvertible):
        S([0, 0, 1], var="z").reversion()


def test_fixed_point_quartic_R():
    r = fixed_point_solve(lambda x: 1 + 3 * TruncSeries.gen("g", 3) * x * x, 1, 3)
    assert r.coeffs == [1, 3, 18, 135]


def test_fixed_point_constant_and_other():
    assert fixed_point_solve(lambda x: TruncSeries.const("g", 7, 4), 7, 4).coeffs[0] == 7
    g = TruncSeries.gen("g", 2)
    # hand iteration: X = 1 + 2g + 6g^2 + ...
    r = fixed_point_solve(lambda x: 1 + g * (x * x + x), 1, 2)
    assert r.coeffs == [1, 2, 6]


def test_fixed_point_non_triangular():
    with pytest.raises(NotContracting):
        fixed_point_solve(lambda x: x + 1, 0, 3)


rat = st.builds(F, st.integers(-50, 50), st.integers(1, 9))
series6 = st.lists(rat, min_size=7, max_size=7).map(lambda c: S(c))
unit_series = st.lists(rat, min_size=6, max_size=6).map(lambda c: S([F(1)] + c))


@settings(max_examples=40, deadline=None)
@given(series6, series6, series6)
def test_ring_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * (b * c) == (a * b) * c
    assert a * b == b * a
    assert a + b == b + a


@settings(max_examples=25, deadline=None)
@given(unit_series)
def test_exp_log_and_sqrt_roundtrip(a):
    assert a.log().exp() == a
    assert a.sqrt() * a.sqrt() == a


@settings(max_examples=25, deadline=None)
@given(st.lists(rat, min_size=5, max_size=5))
def test_reversion_roundtrip(tail):
    a = TruncSeries("z", [F(0), F(1)] + tail)
    assert a.compose(a.reversion()) == TruncSeries.gen("z", a.order)


def test_determinism():
    a = S([F(1), F(2, 3), F(-5, 7), F(1, 2)])
    x = (a * a / a).log().exp()
    y = (a * a / a).log().exp()
    assert x.coeffs == y.coeffs == a.coeffs


def test_symbol_poly_laurent():
    N = SymbolPoly.sym(("N",), "N", laurent=("N",))
    v = 2 * N + N ** (-1)
    assert v.coeff(N=1) == 2 and v.coeff(N=-1) == 1
    assert v.exponents_of("N") == [-1, 1]
    assert (N * N.inverse()) == 1
    with pytest.raises(NonUnitDivisor):
        (N + 1).inverse()


def test_symbol_poly_subs_and_series():
    syms = ("rho", "sigma")
    rho = SymbolPoly.sym(syms, "rho")
    sigma = SymbolPoly.sym(syms, "sigma")
    p = rho * sigma * (1 + rho * sigma)
    assert p.subs(rho=1, sigma=1) == 2
    s = TruncSeries("g", [SymbolPoly.const(syms, 1), p])
    assert (s * s).coeffs[1] == 2 * p


def test_rat_codec_roundtrip():
    for q in [F(0), F(3), F(-9, 8), F(22, 7)]:
        assert rat_parse(rat_str(q)) == q
    assert rat_str(F(9, 8)) == "9/8"
    assert rat_str(F(4)) == "4"


def test_serialization_strings():
    assert S([F(0), F(1, 2), F(9, 8)]).to_strings() == ["0", "1/2", "9/8"]
