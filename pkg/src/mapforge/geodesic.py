"""Distance-refined two-leg generating functions R_n.

The transfer operator Q acts on a formal orthonormal basis by
Q|n> = |n+1> + S_n|n> + R_n|n-1> with vanishing negative indices; the
recursion R_n = 1 + sum_i g g_i <n-1|Q^{i-1}|n> (plus <n|V'(Q)|n> = 0
fixing S_n when odd valences are present) is solved on a finite window
whose tail is seeded with the translation-invariant bulk solution.
"""

from fractions import Fraction
from math import cosh, sinh, sqrt as fsqrt

from .series_core import TruncSeries, fixed_point_solve
from .planar_onecut import OutOfOneCut, Potential, solve_one_cut


class DomainError(ValueError):
    pass


class GeodesicSeries:
    """Window of R_n (and S_n) series, n = 0..n_max."""

    __slots__ = ("R", "S", "order", "n_max", "b", "bulk_R", "bulk_S")

    def __init__(self, R, S, order, n_max, b, bulk_R, bulk_S):
        self.R = R
        self.S = S
        self.order = order
        self.n_max = n_max
        self.b = b
        self.bulk_R = bulk_R
        self.bulk_S = bulk_S


def _bracket(Rw, Sw, n_from, n_to, steps, order):
    """<n_to| Q^steps |n_from> via weighted height paths."""
    zero = TruncSeries.const("g", 0, order)
    one = TruncSeries.const("g", 1, order)
    memo = {}

    def rec(h, left):
        if left == 0:
            return one if h == n_to else zero
        if abs(h - n_to) > left:
            return zero
        key = (h, left)
        if key in memo:
            return memo[key]
        out = rec(h + 1, left - 1)
        s = Sw(h)
        if s is not None:
            out = out + s * rec(h, left - 1)
        r = Rw(h)
        if r is not None:
            out = out + r * rec(h - 1, left - 1)
        memo[key] = out
        return out

    return rec(n_from, steps)


def solve_Rn_series(weights, n_max, order):
    """Triangular solve of the distance recursion for the given couplings."""
    V = Potential(weights)
    sol = solve_one_cut(V, order)
    even = V.is_even()
    b = max(V.degree() // 2 - 1, 1)
    top = n_max + order + 1
    g = TruncSeries.gen("g", order)
    one = TruncSeries.const("g", 1, order)
    zero = TruncSeries.const("g", 0, order)
    R = {n: one for n in range(top + 1)}
    S = {n: zero for n in range(top + 1)}

    def Rw(h):
        if h < 0:
            return None
        return R[h] if h <= top else sol.R

    def Sw(h):
        if even or h < 0:
            return None
        s = S[h] if h <= top else sol.S
        return s if not s.is_zero() else None

    for _ in range(order + 2):
        newR, newS = {}, {}
        for n in range(top + 1):
            acc = one
            for v, gv in V.couplings.items():
                acc = acc + g * gv * _bracket(Rw, Sw, n, n - 1, v - 1, order)
            newR[n] = acc
            if not even:
                sacc = zero
                for v, gv in V.couplings.items():
                    sacc = sacc + g * gv * _bracket(Rw, Sw, n, n, v - 1, order)
                newS[n] = sacc
        R.update(newR)
        if not even:
            S.update(newS)
    keepR = {n: R[n] for n in range(n_max + 1)}
    keepS = {n: S[n] for n in range(n_max + 1)}
    return GeodesicSeries(keepR, keepS, order, n_max, b, sol.R, sol.S)


def char_root_series(order):
    """x = O(g) solving x + 1/x + 4 = 1/(gR), i.e. x = gR(1 + 4x + x^2)."""
    R = solve_one_cut(Potential.quartic(), order + 1).R.truncate(order)
    g = TruncSeries.gen("g", order)

    def eq(x):
        return g * R * (1 + 4 * x + x * x)

    return fixed_point_solve(eq, 0, order)


def quartic_R_numeric(g):
    """Bulk R = (1 - sqrt(1-12g))/(6g) on the one-cut branch."""
    if g < 0 or 1.0 - 12.0 * g <= 0:
        raise OutOfOneCut("quartic one-cut regime needs 0 <= g < 1/12")
    if g == 0:
        return 1.0
    return (1.0 - fsqrt(1.0 - 12.0 * g)) / (6.0 * g)


def char_root_numeric(g):
    """The |x| < 1 root of the characteristic equation at numeric g."""
    R = quartic_R_numeric(g)
    if g == 0:
        return 0.0
    B = 1.0 / (g * R) - 4.0
    return (B - fsqrt(B * B - 4.0)) / 2.0


def exact_Rn_quartic(n, g=None, order=None):
    """R_n = R (1-x^{n+1})(1-x^{n+4}) / ((1-x^{n+2})(1-x^{n+3})).

    Series mode when order is given, numeric mode when g is a float.
    """
    if order is not None:
        R = solve_one_cut(Potential.quartic(), order + 1).R.truncate(order)
        x = char_root_series(order)
        one = TruncSeries.const("g", 1, order)
        num = (one - x ** (n + 1)) * (one - x ** (n + 4))
        den = (one - x ** (n + 2)) * (one - x ** (n + 3))
        return R * num / den
    R = quartic_R_numeric(g)
    x = char_root_numeric(g)
    num = (1.0 - x ** (n + 1)) * (1.0 - x ** (n + 4))
    den = (1.0 - x ** (n + 2)) * (1.0 - x ** (n + 3))
    return R * num / den


def integral_of_motion(pair, g):
    """f(x,y) = xy(1 - gx - gy) - x - y on a consecutive pair (R_n, R_{n+1})."""
    a, b = pair
    return a * b * (1 - g * a - g * b) - a - b


def quartic_coeff_table(n_max, A, numeric=False):
    """Taylor coefficients of R_n through g-order A from the three-term
    recursion, order by order; exact Fractions, or floats rescaled by
    12^-k per order to avoid overflow (growth is ~12^A)."""
    cast = float if numeric else Fraction
    scale = cast(Fraction(1, 12)) if numeric else cast(1)
    top = n_max + A + 1
    bulk = [cast(1)] + [cast(0)] * A
    for k in range(1, A + 1):
        # R = 1 + 3 g R^2
        bulk[k] = 3 * scale * sum(bulk[i] * bulk[k - 1 - i] for i in range(k))
    c = {n: [cast(1)] + [cast(0)] * A for n in range(top + 1)}

    def at(n, j):
        if n < 0:
            return cast(0)
        return c[n][j] if n <= top else bulk[j]

    for k in range(1, A + 1):
        for n in range(top + 1):
            acc = cast(0)
            for i in range(k):
                acc += c[n][i] * (at(n + 1, k - 1 - i) + c[n][k - 1 - i]
                                  + at(n - 1, k - 1 - i))
            c[n][k] = scale * acc
    return {n: c[n] for n in range(n_max + 1)}


def fixed_area_ratio(n, A, numeric=None):
    """B_n(A) = [g^A]R_n / [g^A]R_0 for 4-valent graphs of area A."""
    if A < 1:
        raise DomainError("area must be >= 1")
    if numeric is None:
        numeric = A > 60
    table = quartic_coeff_table(n, A, numeric=numeric)
    denom = table[0][A]
    assert denom != 0
    return table[n][A] / denom


def bn_infinity(n):
    """Large-area limit of B_n."""
    poly = 140 + 270 * n + 179 * n ** 2 + 50 * n ** 3 + 5 * n ** 4
    return Fraction(3, 280) * Fraction((n + 1) * (n + 4), (n + 2) * (n + 3)) * poly


def scaling_F(r):
    """Continuum two-point scaling function F(r) = 3 / sinh^2(sqrt(3/2) r)."""
    if r <= 0:
        raise DomainError("r must be positive")
    s = fsqrt(1.5) * r
    return 3.0 / sinh(s) ** 2


def scaling_G(r):
    """G = -F'."""
    if r <= 0:
        raise DomainError("r must be positive")
    s = fsqrt(1.5) * r
    return 6.0 * fsqrt(1.5) * cosh(s) / sinh(s) ** 3


class TwoPointScaling:
    F = staticmethod(scaling_F)
    G = staticmethod(scaling_G)
    a = fsqrt(6.0)


def continuum_two_point(grid):
    """(r, F(r), G(r)) rows over the grid."""
    return [(r, scaling_F(r), scaling_G(r)) for r in grid]


def discrete_to_continuum_check(eps, r_grid=None):
    """Max over the grid of |(R - R_n)/(eps^2 R) - F(n eps)| at
    g = (1 - eps^4)/12 with n = round(r/eps)."""
    if not 0 < eps <= 0.1:
        raise DomainError("eps must lie in (0, 0.1]")
    if r_grid is None:
        r_grid = [0.5 + 0.1 * i for i in range(16)]
    g = (1.0 - eps ** 4) / 12.0
    R = quartic_R_numeric(g)
    worst = 0.0
    for r in r_grid:
        n = round(r / eps)
        Rn = exact_Rn_quartic(n, g=g)
        dev = abs((R - Rn) / (eps * eps * R) - scaling_F(n * eps))
        worst = max(worst, dev)
    return worst
