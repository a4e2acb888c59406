"""Distance profiles and local-environment statistics of quadrangulations.

Finite-area averages are exact rationals built from the distance-refined
series R_n; the infinite-area limits are the closed forms obtained from
the cubic relation for the local-environment generating function Gamma.
Averages refer to the vertex-origin ensemble: a quadrangulation weighted
by 1/|Aut| with a uniformly marked origin vertex, equivalently uniform
rooted quadrangulations with the root start as origin reweighted by
1/deg(origin).
"""

from fractions import Fraction
from functools import lru_cache
from math import comb, sqrt

from .series_core import SymbolPoly, TruncSeries, fixed_point_solve
from .planar_onecut import Potential, solve_one_cut
from .geodesic import solve_Rn_series
from .bijections import distance_profile, sample_quadrangulation_uniform


class IntegrationObstruction(ValueError):
    pass


class BranchError(ValueError):
    pass


@lru_cache(maxsize=None)
def _quartic_R(order):
    return solve_one_cut(Potential.quartic(), order).R


@lru_cache(maxsize=None)
def _quartic_window(n_max, order):
    return solve_Rn_series({4: Fraction(1)}, max(n_max, 4), order)


def edges_at_distance(n, A):
    """Average number of edges from distance n to n+1 in area-A
    quadrangulations seen from their origin; exact rational."""
    if A < 1:
        raise ValueError("area must be >= 1")
    gs = _quartic_window(n, A)
    RnA = gs.R[n].coeffs[A] if n <= gs.n_max else gs.bulk_R.coeffs[A]
    Rn1A = gs.R[n - 1].coeffs[A] if n >= 1 else Fraction(0)
    e0 = Fraction(4 * A, A + 2)
    return e0 * (RnA - Rn1A) / gs.R[0].coeffs[A]


def edges_at_distance_asymptotic(n):
    """Infinite-area limit; grows as 6 n^3 / 7."""
    num = (n * n + 4 * n + 2) * (5 * n ** 4 + 40 * n ** 3 + 117 * n * n
                                 + 148 * n + 70)
    return Fraction(6, 35) * Fraction(num, (n + 1) * (n + 2) * (n + 3))


def vertex_layer_series(n, order):
    """Generating function V_n of quadrangulations with an origin and a
    marked vertex at distance n: log(R_{n-1}/R_{n-2}), log R_0 for n=1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gs = _quartic_window(n - 1, order)
    if n == 1:
        return gs.R[0].log()
    return (gs.R[n - 1] / gs.R[n - 2]).log()


def vertices_at_distance(n, A):
    """Average number of vertices at distance n in area-A quadrangulations
    seen from their origin; exact rational."""
    if A < 1:
        raise ValueError("area must be >= 1")
    if n == 0:
        return Fraction(1)
    Vn = vertex_layer_series(n, A).coeffs[A]
    R0A = _quartic_window(1, A).R[0].coeffs[A]
    # the pointed-quadrangulation count at area A is (A+2) R_{0,A} / (4A)
    return Fraction(4 * A, A + 2) * Vn / R0A


def vertices_at_distance_asymptotic(n):
    if n == 0:
        return Fraction(1)
    extra = 1 if n == 1 else 0
    return Fraction(3, 35) * ((n + 1) * (5 * n * n + 10 * n + 2) + extra)


@lru_cache(maxsize=4)
def _large_area_profile(A, n_max):
    """Float <v_n>_A for n = 0..n_max from the closed form of R_n.

    Series are carried in the rescaled variable h = 12g so coefficients
    stay bounded; the rescaling cancels in the coefficient ratios."""
    import numpy as np
    N = A + 1

    def mul(a, b):
        return np.convolve(a, b)[:N]

    def div(a, b):
        q = np.zeros(N)
        for k in range(N):
            q[k] = (a[k] - np.dot(b[1:k + 1], q[k - 1::-1][:k])) / b[0]
        return q

    def log_series(s):
        t = div(np.arange(N) * s, s)
        out = np.zeros(N)
        out[1:] = t[1:] / np.arange(1, N)
        return out

    one = np.zeros(N)
    one[0] = 1.0
    # R = 1 + (1/4) h R^2
    r = np.zeros(N)
    r[0] = 1.0
    for k in range(1, N):
        r[k] = 0.25 * np.dot(r[:k], r[k - 1::-1])
    # x = (h/12) R (1 + 4x + x^2), order by order
    x = np.zeros(N)
    P = np.zeros(N)
    P[0] = 1.0
    for k in range(1, N):
        j = k - 1
        if j > 0:
            P[j] = 4.0 * x[j] + (np.dot(x[1:j], x[j - 1:0:-1]) if j >= 2
                                 else 0.0)
        x[k] = np.dot(r[:k], P[k - 1::-1]) / 12.0
    xp = {0: one}
    for j in range(1, n_max + 4):
        xp[j] = mul(xp[j - 1], x)

    def Rn(n):
        num = mul(one - xp[n + 1], one - xp[n + 4])
        den = mul(one - xp[n + 2], one - xp[n + 3])
        return mul(r, div(num, den))

    logs = [log_series(Rn(n)) for n in range(n_max)]
    R0A = Rn(0)[A]
    pref = 4.0 * A / (A + 2)
    out = [1.0]
    for n in range(1, n_max + 1):
        Vn = logs[0] if n == 1 else logs[n - 1] - logs[n - 2]
        out.append(pref * Vn[A] / R0A)
    return tuple(out)


def vertices_at_distance_numeric(n, A):
    """Float evaluation of vertices_at_distance for areas far beyond what
    exact rational series can reach."""
    if A < 1:
        raise ValueError("area must be >= 1")
    return _large_area_profile(A, max(n, 5))[n]


# ---------------------------------------------------------------------------
# weighted R_n system with the conserved-quantity closure


def _exact_quotient(p, num, den):
    """Exact quotient of SymbolPoly p by (num*den - 1) for two symbols."""
    symbols = p.symbols
    ri = symbols.index(num)
    si = symbols.index(den)
    terms = {e: c for e, c in p.terms.items()}
    out = {}
    while terms:
        e = max(terms, key=lambda t: t[ri])
        if e[ri] < 1:
            raise ArithmeticError("polynomial not divisible by %s*%s-1"
                                  % (num, den))
        c = terms.pop(e)
        qe = list(e)
        qe[ri] -= 1
        qe[si] -= 1
        qe = tuple(qe)
        out[qe] = out.get(qe, Fraction(0)) + c
        terms[qe] = terms.get(qe, Fraction(0)) + c
        if terms[qe] == 0:
            del terms[qe]
    return SymbolPoly(symbols, out)


def weighted_Zn_solve(k, order):
    """Z_n series, n = 0..k+1, with symbolic weights rho_p, sigma_p.

    The k+1 explicit relations Z_n = sigma_n rho_n / (1 - g sigma_n
    (Z_{n+1}+Z_n+Z_{n-1})) are used order by order, and Z_{k+1} is fixed
    at each order by the conserved quantity f(Z_k, Z_{k+1}) = f(R, R)."""
    syms = tuple("rho%d" % p for p in range(k + 1)) \
        + tuple("sigma%d" % p for p in range(k + 1))
    zero = SymbolPoly.const(syms, 0)
    one = SymbolPoly.const(syms, 1)
    rho = [SymbolPoly.sym(syms, "rho%d" % p) for p in range(k + 1)]
    sig = [SymbolPoly.sym(syms, "sigma%d" % p) for p in range(k + 1)]
    R = _quartic_R(order)
    g = TruncSeries.gen("g", order)
    fRR = (R * R * (1 - 2 * g * R) - 2 * R).coeffs
    z = {n: [zero] * (order + 1) for n in range(-1, k + 2)}
    for n in range(k + 1):
        z[n][0] = sig[n] * rho[n]
    z[k + 1][0] = one

    def conv(*lists):
        A = order
        out = [zero] * (A + 1)
        for i, a in enumerate(lists[0]):
            out[i] = a
        for nxt in lists[1:]:
            new = [zero] * (A + 1)
            for i in range(A + 1):
                for j in range(A + 1 - i):
                    if out[i] and nxt[j]:
                        new[i + j] = new[i + j] + out[i] * nxt[j]
            out = new
        return out

    for A in range(1, order + 1):
        for n in range(k + 1):
            acc = zero
            for a in range(A):
                b = A - 1 - a
                acc = acc + z[n][a] * (z[n + 1][b] + z[n][b] + z[n - 1][b])
            z[n][A] = sig[n] * acc
        # conserved quantity fixes z[k+1][A]; with u the unknown the order-A
        # relation reads u*(rho_k sigma_k - 1) + partial = [g^A] f(R,R)
        zk, zk1 = z[k], z[k + 1]
        p1 = conv(zk, zk1)[A]
        p2 = conv(zk, zk, zk1)[A - 1]
        p3 = conv(zk, zk1, zk1)[A - 1]
        partial = p1 - p2 - p3 - zk[A]
        rhs = fRR[A] - partial
        z[k + 1][A] = _exact_quotient(rhs, "rho%d" % k, "sigma%d" % k)
    return {n: TruncSeries("g", z[n]) for n in range(k + 2)}


def weighted_Rn_solve(rho, sigma, order):
    """R_n = Z_n / sigma_n for explicit rational weights rho, sigma
    (sequences over p = 0..k)."""
    k = len(rho) - 1
    if len(sigma) != k + 1:
        raise ValueError("rho and sigma must have the same length")
    zs = weighted_Zn_solve(k, order)
    values = {}
    for p in range(k + 1):
        values["rho%d" % p] = Fraction(rho[p])
        values["sigma%d" % p] = Fraction(sigma[p])
    out = {}
    for n, series in zs.items():
        s = Fraction(sigma[n]) if n <= k else Fraction(1)
        if s == 0:
            raise ValueError("sigma weights must be nonzero")
        out[n] = series.map_coeffs(lambda c: c.subs(**values) / s)
    return out


def quartic_R0_rho_sigma(order):
    """R_0(g | rho, sigma): the unique solution with R_0 = rho + O(g) of
    the quartic relation obtained by eliminating Z_1, as a series with
    coefficients polynomial in (rho, sigma)."""
    syms = ("rho", "sigma")
    rho = SymbolPoly.sym(syms, "rho")
    sig = SymbolPoly.sym(syms, "sigma")
    zero = SymbolPoly.const(syms, 0)
    Rb = _quartic_R(order)
    g = TruncSeries.gen("g", order)
    GR = (g * Rb * (1 - g * Rb * Rb)).map_coeffs(
        lambda c: SymbolPoly.const(syms, c))
    gS = TruncSeries("g", [zero, SymbolPoly.const(syms, 1)]
                     + [zero] * (order - 1))
    coeffs = [rho] + [zero] * order
    for A in range(1, order + 1):
        cur = TruncSeries("g", coeffs)
        F = (cur - rho) * (1 + cur - gS * sig ** 2 * cur * cur - rho) \
            - sig * cur * (cur - rho + GR) + gS * sig ** 3 * cur ** 3
        res = F.coeffs[A]
        coeffs[A] = _exact_quotient(res, "rho", "sigma")
    return TruncSeries("g", coeffs)


def integrate_sigma_log(series):
    """Termwise integral_0^sigma ... ds/s: sigma^m -> sigma^m / m on every
    positive g-order; a sigma-free term there has no primitive."""
    si = series.coeffs[1].symbols.index("sigma") if series.order >= 1 \
        else 1
    out = [series.coeffs[0] * 0]
    for A in range(1, series.order + 1):
        terms = {}
        for e, c in series.coeffs[A].terms.items():
            m = e[si]
            if m == 0:
                raise IntegrationObstruction(
                    "sigma-free term at positive area")
            terms[e] = c / m
        out.append(SymbolPoly(series.coeffs[A].symbols, terms))
    return TruncSeries("g", out)


def unrooted_Gamma0(order):
    """Gamma_0 = integral_0^sigma R_0(g | rho, s) ds / s over A >= 1:
    the generating function of quadrangulations with an origin vertex."""
    return integrate_sigma_log(quartic_R0_rho_sigma(order))


def local_weight_average(A, order=None):
    """The polynomial <rho^N1 sigma^N01>_A = Gamma_{0,A}(rho,sigma) /
    Gamma_{0,A}(1,1); N1 counts neighbors of the origin, N01 edges at the
    origin."""
    if order is None:
        order = A
    G = unrooted_Gamma0(order).coeffs[A]
    norm = G.subs(rho=1, sigma=1)
    return G / norm


# ---------------------------------------------------------------------------
# infinite-area local environment


def _gamma_cubic_coeffs(rho, sigma):
    a3 = 6 - 2 * sigma - 3 * rho * sigma
    a2 = 24 - 8 * sigma - 12 * rho * sigma
    a1 = 18 - 2 * sigma - 15 * rho * sigma
    a0 = -6 * rho * sigma
    return a3, a2, a1, a0


def gamma_infinite(rho, sigma):
    """Gamma(rho, sigma) = lim_A <rho^N1 sigma^N01>_A: the real cubic root
    continuing the branch with Gamma(1,1) = 1."""
    import numpy as np
    coeffs = [float(c) for c in _gamma_cubic_coeffs(rho, sigma)]
    if abs(coeffs[0]) < 1e-12:
        raise BranchError("degenerate cubic")
    roots = np.roots(coeffs)
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-9)
    if not real:
        raise BranchError("no real root")
    top = real[-1]
    if len(real) > 1 and real[-1] - real[-2] < 1e-9:
        raise BranchError("branch collision near the discriminant locus")
    if top <= -1:
        raise BranchError("branch left the physical region")
    return top


def gamma_rho_series(order):
    """Series of Gamma(rho, 1) in rho from the cubic relation."""
    var = "rho"
    rho = TruncSeries.gen(var, order)
    den = 16 - 15 * rho

    def eq(G):
        return (6 * rho - (16 - 12 * rho) * G * G
                - (4 - 3 * rho) * G * G * G) / den

    return fixed_point_solve(eq, 0, order, var=var)


def gamma_sigma_series(order):
    """Series of Gamma(1, sigma) in sigma from the cubic relation."""
    var = "sigma"
    s = TruncSeries.gen(var, order)
    den = 18 - 17 * s

    def eq(G):
        return (6 * s - (24 - 20 * s) * G * G - (6 - 5 * s) * G * G * G) / den

    return fixed_point_solve(eq, 0, order, var=var)


def gamma_rho_closed_form(order):
    """2 / sqrt(4 - 3 rho) - 1 as a series in rho."""
    rho = TruncSeries.gen("rho", order)
    return (1 - Fraction(3, 4) * rho).pow_frac(Fraction(-1, 2)) - 1


def gamma_sigma_closed_form(order):
    """(sqrt((6 + 3 sigma)/(6 - 5 sigma)) - 1) / 2 as a series in sigma."""
    s = TruncSeries.gen("sigma", order)
    ratio = (6 + 3 * s) / (6 - 5 * s)
    return (ratio.sqrt() - 1) / 2


def neighbor_pgf(n):
    """P(n) = (3/16)^n C(2n, n): probability of n neighbors of a vertex in
    an infinite quadrangulation."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Fraction(3, 16) ** n * comb(2 * n, n)


def simple_neighbor_pgf(t):
    """Pi(t) = sqrt((8 - t)/(2 - t)) - 2: generating function over the
    numbers of neighbors not connected to the origin by multiple edges."""
    if not t < 2:
        raise ValueError("t must be < 2")
    return sqrt((8.0 - t) / (2.0 - t)) - 2.0


# ---------------------------------------------------------------------------
# Monte-Carlo distance profile


def mc_profile(A, n_max, samples, seed, method="reweighted"):
    """Estimated (mean, stderr) of the number of vertices at each distance
    n = 0..n_max around the origin of random area-A quadrangulations.

    method "reweighted": uniform rooted quadrangulations with origin at the
    root start, importance weights 1/deg(origin) converting to the
    vertex-origin measure.  method "pointed": the pointed construction
    samples that measure directly from the shifted tree labels."""
    if method not in ("reweighted", "pointed"):
        raise ValueError("unknown method")
    sums = [0.0] * (n_max + 1)
    sq = [[] for _ in range(n_max + 1)]
    data = []
    wts = []
    for i in range(samples):
        if method == "reweighted":
            m = sample_quadrangulation_uniform(A, seed, i)
            counts, deg = distance_profile(m)
            w = 1.0 / deg
        else:
            from .bijections import (_rng, random_plane_tree,
                                     _free_label_shape, tree_label_profile)
            rng = _rng(seed, i)
            t = _free_label_shape(random_plane_tree(A, rng), rng)
            labs = tree_label_profile(t)
            low = min(labs)
            counts = {l - low + 1: c for l, c in labs.items()}
            counts[0] = 1
            w = 1.0
        data.append([counts.get(n, 0) for n in range(n_max + 1)])
        wts.append(w)
    wsum = sum(wts)
    out = []
    for n in range(n_max + 1):
        est = sum(w * row[n] for w, row in zip(wts, data)) / wsum
        var = sum((w * (row[n] - est)) ** 2 for w, row in zip(wts, data))
        se = sqrt(var) / wsum
        out.append((est, se))
    return out
