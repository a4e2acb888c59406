"""Large-N one-cut solution for an arbitrary polynomial potential.

V(x) = x^2/2 - sum_i g_i x^i / i, every i-valent vertex carrying one power
of the counting variable g.  The support endpoints are encoded by S and R
through a = S - 2 sqrt(R), b = S + 2 sqrt(R); the residue system

    V'_0 = 0,   V'_{-1} = 1

with V'_m the coefficient of w^m in V'(w + S + R/w) determines R and S
order by order.  For even potentials S vanishes identically and the first
equation is trivial.
"""

from fractions import Fraction
from math import comb, factorial, pi, sqrt as fsqrt

from .series_core import SymbolPoly, TruncSeries


class EvenOnly(ValueError):
    pass


class OutOfOneCut(ValueError):
    pass


class Potential:
    """Couplings valence -> Fraction; V(x) = x^2/2 - sum g_i x^i/i."""

    def __init__(self, couplings):
        self.couplings = {int(v): Fraction(c) for v, c in couplings.items()
                          if c != 0}
        for v in self.couplings:
            if v < 1:
                raise ValueError("valence must be >= 1")

    def is_even(self):
        return all(v % 2 == 0 for v in self.couplings)

    def degree(self):
        return max(self.couplings, default=2)

    @classmethod
    def quartic(cls, g4=1):
        return cls({4: g4})


class OneCutSolution:
    __slots__ = ("R", "S")

    def __init__(self, R, S):
        self.R = R
        self.S = S

    def endpoints(self, g):
        r = self.R.eval_float(g)
        s = self.S.eval_float(g)
        return s - 2.0 * fsqrt(r), s + 2.0 * fsqrt(r)


def _laurent_coeff_of_power(k, m, S, R):
    """Coefficient of w^m in (w + S + R/w)^k, S and R series."""
    total = None
    for a in range(k + 1):
        for c in range(k - a + 1):
            if a - c != m:
                continue
            b = k - a - c
            mult = factorial(k) // (factorial(a) * factorial(b) * factorial(c))
            term = mult * (S ** b) * (R ** c)
            total = term if total is None else total + term
    if total is None:
        return 0
    return total


def _vprime_m(V, m, S, R, g):
    """V'_m = [w^m] V'(w + S + R/w) as a series in g."""
    # the x term of V'(x) = x - sum g_i x^{i-1}
    if m == 1:
        out = TruncSeries.const(g.var, 1, g.order) * 1
    elif m == 0:
        out = S * 1
    elif m == -1:
        out = R * 1
    else:
        out = TruncSeries.const(g.var, 0, g.order)
    for v, gi in V.couplings.items():
        c = _laurent_coeff_of_power(v - 1, m, S, R)
        out = out - g * gi * c
    return out


def solve_one_cut(V, order):
    """Series solution with R = 1 + O(g), S = O(g)."""
    g = TruncSeries.gen("g", order)
    R = TruncSeries.const("g", 1, order)
    S = TruncSeries.const("g", 0, order)
    even = V.is_even()
    for _ in range(order + 2):
        # R = 1 + sum g_i [w^{-1}](...)^{i-1},  S = sum g_i [w^0](...)^{i-1}
        newR = TruncSeries.const("g", 1, order)
        newS = TruncSeries.const("g", 0, order)
        for v, gi in V.couplings.items():
            newR = newR + g * gi * _laurent_coeff_of_power(v - 1, -1, S, R)
            if not even:
                newS = newS + g * gi * _laurent_coeff_of_power(v - 1, 0, S, R)
        R, S = newR, newS
    sol = OneCutSolution(R, S)
    assert residue_coeff(V, sol, 0).is_zero()
    assert residue_coeff(V, sol, -1) == 1
    return sol


def residue_coeff(V, sol, m):
    g = TruncSeries.gen("g", sol.R.order)
    return _vprime_m(V, m, sol.S, sol.R, g)


def gamma_one(V, sol):
    """One-leg planar generating function, leg in the external face."""
    return residue_coeff(V, sol, -2) + sol.S


def gamma_two_sameface(V, sol):
    """Two legs in the same (external) face."""
    vm2 = residue_coeff(V, sol, -2)
    return sol.R + residue_coeff(V, sol, -3) - vm2 * vm2


def gamma_one_one(V, sol):
    """Two legs anywhere: equals R."""
    return sol.R


def r_of_z(V, order):
    """The root r(z) of z = r - sum_k g_{2k} C(2k-1,k) r^k, as a series in g
    with coefficients polynomial in z (z carried as a Laurent symbol)."""
    if not V.is_even():
        raise EvenOnly("r(z) is defined for even potentials")
    syms, lau = ("z",), ("z",)
    z = SymbolPoly.sym(syms, "z", lau)
    g = TruncSeries.gen("g", order)
    r = TruncSeries.const("g", z, order)
    for _ in range(order + 2):
        acc = TruncSeries.const("g", z, order)
        for v, gi in V.couplings.items():
            k = v // 2
            acc = acc + g * (gi * comb(2 * k - 1, k)) * r ** k
        r = acc
    return r


def planar_free_energy(V, order):
    """Genus-zero free energy with f(0) = 0, even potentials only.

    Integrates (1-z) log(r(z)/z) over z in [0,1] termwise; for the pure
    quartic model the closed form (1/2) log R + (R-1)(R-9)/24 is used and
    the two routes agree (tested).
    """
    if not V.is_even():
        raise EvenOnly("planar free energy implemented for even potentials")
    if set(V.couplings) == {4} or not V.couplings:
        sol = solve_one_cut(V, order)
        R = sol.R
        return R.log() / 2 + (R - 1) * (R - 9) / 24
    return _free_energy_integral(V, order)


def _free_energy_integral(V, order):
    r = r_of_z(V, order)
    z = SymbolPoly.sym(("z",), "z", ("z",))
    ratio = r * z.inverse()
    lg = ratio.log()
    coeffs = []
    for c in lg.coeffs:
        if isinstance(c, SymbolPoly):
            total = Fraction(0)
            for (e,), q in c.terms.items():
                if e < 0:
                    raise AssertionError("negative z power in log(r/z)")
                # integral of (1-z) z^e over [0,1]
                total += q * (Fraction(1, e + 1) - Fraction(1, e + 2))
            coeffs.append(total)
        else:
            coeffs.append(Fraction(c) if c else Fraction(0))
    return TruncSeries("g", coeffs)


def quartic_closed_form_f(order):
    sol = solve_one_cut(Potential.quartic(), order)
    R = sol.R
    return R.log() / 2 + (R - 1) * (R - 9) / 24


def _numeric_R_even(V, g):
    """Solve 1 = phi(R) = R - g sum g_{2k} C(2k-1,k) R^k on the one-cut branch."""
    def phi(r):
        return r - g * sum(float(gi) * comb(v // 2 * 2 - 1, v // 2) * r ** (v // 2)
                           for v, gi in V.couplings.items())

    def dphi(r):
        out = 1.0
        for v, gi in V.couplings.items():
            k = v // 2
            out -= g * float(gi) * comb(2 * k - 1, k) * k * r ** (k - 1)
        return out

    r = 1.0
    for _ in range(200):
        d = dphi(r)
        if d <= 0:
            raise OutOfOneCut("left the one-cut branch")
        step = (phi(r) - 1.0) / d
        r -= step
        if abs(step) < 1e-14:
            break
    else:
        raise OutOfOneCut("Newton did not converge")
    if dphi(r) <= 0:
        raise OutOfOneCut("critical or supercritical coupling")
    return r


def spectral_density_eval(V, g, x):
    """Eigenvalue density at x for an even potential at numeric coupling g."""
    if not V.is_even():
        raise EvenOnly("density implemented for even potentials")
    if set(V.couplings) <= {4}:
        g4 = float(V.couplings.get(4, 0)) * g
        if 1.0 - 12.0 * g4 <= 0:
            raise OutOfOneCut("quartic one-cut regime needs 1-12g > 0")
    R = _numeric_R_even(V, g)
    if x * x >= 4.0 * R:
        return 0.0
    # polynomial part M(x) of V'(x)/sqrt(x^2-4R), via the 1/x expansion
    # of 1/sqrt(1-4R/x^2) = sum_j C(2j,j) (R/x^2)^j
    M = {}
    vp = {1: 1.0}
    for v, gi in V.couplings.items():
        vp[v - 1] = vp.get(v - 1, 0.0) - float(gi) * g
    for d, c in vp.items():
        for j in range(d // 2 + 1):
            power = d - 1 - 2 * j
            if power >= 0:
                M[power] = M.get(power, 0.0) + c * comb(2 * j, j) * R ** j
    mval = sum(c * x ** p for p, c in M.items())
    return mval / (2.0 * pi) * fsqrt(4.0 * R - x * x)
