"""Brute-force Gaussian matrix-integral oracle.

Star diagrams are laid out as labeled darts 0..2E-1 grouped per vertex in
counterclockwise order; a Wick pairing is a fixed-point-free involution
alpha on the darts.  Faces are the cycles of sigma∘alpha and each pairing
contributes N^(F-E).  Labeled counting together with the (N g_i)^{n_i} /
(i^{n_i} n_i!) prefactors reproduces 1/|Aut| automatically, so no
isomorphism machinery appears anywhere.
"""

from fractions import Fraction
from math import factorial

from .series_core import SymbolPoly, TruncSeries

DEFAULT_CAP = 16


class TooLarge(ValueError):
    pass


class MalformedMap(ValueError):
    pass


class CombinatorialMap:
    """Half-edge map: sigma rotates darts around vertices, alpha pairs them."""

    __slots__ = ("sigma", "alpha", "root")

    def __init__(self, sigma, alpha, root=None):
        self.sigma = tuple(sigma)
        self.alpha = tuple(alpha)
        self.root = root
        n = len(self.sigma)
        if len(self.alpha) != n:
            raise MalformedMap("sigma and alpha act on different dart sets")
        if sorted(self.sigma) != list(range(n)) or sorted(self.alpha) != list(range(n)):
            raise MalformedMap("not permutations")
        for d in range(n):
            if self.alpha[d] == d or self.alpha[self.alpha[d]] != d:
                raise MalformedMap("alpha is not a fixed-point-free involution")

    @property
    def n_darts(self):
        return len(self.sigma)

    def vertices(self):
        return _cycles(self.sigma)

    def faces(self):
        sigma, alpha = self.sigma, self.alpha
        return _cycles([sigma[alpha[d]] for d in range(len(sigma))])

    def components(self):
        """Connected components as lists of darts."""
        n = len(self.sigma)
        seen = [False] * n
        comps = []
        for start in range(n):
            if seen[start]:
                continue
            stack, comp = [start], []
            seen[start] = True
            while stack:
                d = stack.pop()
                comp.append(d)
                for e in (self.sigma[d], self.alpha[d]):
                    if not seen[e]:
                        seen[e] = True
                        stack.append(e)
            comps.append(comp)
        return comps


def _cycles(perm):
    n = len(perm)
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = []
        d = start
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = perm[d]
        out.append(cyc)
    return out


def star_sigma(profile):
    """Vertex rotation for a star layout of the given valence profile."""
    sigma = []
    base = 0
    for valence in sorted(profile):
        for _ in range(profile[valence]):
            sigma.extend(base + (i + 1) % valence for i in range(valence))
            base += valence
    return sigma


def _pairings(n):
    """All fixed-point-free involutions of range(n), as alpha lists."""
    alpha = [-1] * n

    def rec(free):
        if not free:
            yield list(alpha)
            return
        a = free[0]
        rest = free[1:]
        for idx, b in enumerate(rest):
            alpha[a], alpha[b] = b, a
            yield from rec(rest[:idx] + rest[idx + 1:])
        alpha[a] = -1

    yield from rec(list(range(n)))


def enumerate_pairings(profile, cap=DEFAULT_CAP):
    """Stream of CombinatorialMap over all Wick pairings of the profile."""
    n = sum(v * m for v, m in profile.items())
    if n > cap:
        raise TooLarge("profile has %d half-edges, cap is %d" % (n, cap))
    if n % 2:
        return
    sigma = star_sigma(profile)
    for alpha in _pairings(n):
        yield CombinatorialMap(sigma, alpha)


def faces_and_genus(m):
    """(V, E, F, genus list per connected component)."""
    V = len(m.vertices())
    E = m.n_darts // 2
    F = len(m.faces())
    genera = []
    face_of = {}
    for i, f in enumerate(m.faces()):
        for d in f:
            face_of[d] = i
    vert_of = {}
    for i, v in enumerate(m.vertices()):
        for d in v:
            vert_of[d] = i
    for comp in m.components():
        cv = len({vert_of[d] for d in comp})
        cf = len({face_of[d] for d in comp})
        ce = len(comp) // 2
        chi = cv - ce + cf
        if chi % 2:
            raise MalformedMap("odd Euler characteristic")
        genera.append((2 - chi) // 2)
    return V, E, F, genera


def _face_count(sigma, alpha):
    n = len(sigma)
    seen = [False] * n
    count = 0
    for start in range(n):
        if seen[start]:
            continue
        count += 1
        d = start
        while not seen[d]:
            seen[d] = True
            d = sigma[alpha[d]]
    return count


def gaussian_trace_average(profile, cap=DEFAULT_CAP, symbols=("N",), laurent=("N",)):
    """<prod_i (Tr M^i)^{n_i}> under the Gaussian measure, exact in N."""
    n = sum(v * m for v, m in profile.items())
    if n > cap:
        raise TooLarge("profile has %d half-edges, cap is %d" % (n, cap))
    zero = SymbolPoly.const(symbols, 0, laurent)
    if n % 2:
        return zero
    if n == 0:
        return SymbolPoly.const(symbols, 1, laurent)
    sigma = star_sigma(profile)
    E = n // 2
    N = SymbolPoly.sym(symbols, "N", laurent)
    powers = {}
    for alpha in _pairings(n):
        k = _face_count(sigma, alpha) - E
        powers[k] = powers.get(k, 0) + 1
    total = zero
    for k, mult in powers.items():
        total = total + mult * N ** k
    return total


def catalan(p):
    return factorial(2 * p) // (factorial(p) ** 2 * (p + 1))


def _profiles(valences, max_vertices, insert_limits):
    """All vertex multiplicity assignments within the g-order budget.

    valences: list of (valence, counts_toward_g) in fixed order; valences
    not counting toward g are bounded by insert_limits instead.
    Yields dicts valence -> multiplicity (zero entries omitted).
    """
    out = {}

    def rec(i, g_left):
        if i == len(valences):
            yield dict(out)
            return
        valence, counted = valences[i]
        limit = g_left if counted else insert_limits[valence]
        for m in range(limit + 1):
            if m:
                out[valence] = m
            yield from rec(i + 1, g_left - m if counted else g_left)
            out.pop(valence, None)

    yield from rec(0, max_vertices)


def partition_series_Z(weights, order, cap=DEFAULT_CAP,
                       symbols=("N",), laurent=("N",)):
    """Z as a series in g; coefficient of g^k sums profiles with k vertices.

    weights maps valence -> coupling value (Fraction, or SymbolPoly over
    `symbols` for marked-vertex bookkeeping); every vertex carries one
    power of the counting variable g and the prefactor
    (N g_i)^{n_i} / (i^{n_i} n_i!).
    """
    counted = sorted(v for v in weights if weights[v] != 0)
    worst = order * max(counted, default=0)
    if worst > cap:
        raise TooLarge("order %d needs up to %d half-edges, cap is %d"
                       % (order, worst, cap))
    vlist = [(v, True) for v in counted]
    one = SymbolPoly.const(symbols, 1, laurent)
    N = SymbolPoly.sym(symbols, "N", laurent)
    coeffs = [SymbolPoly.const(symbols, 0, laurent) for _ in range(order + 1)]
    for profile in _profiles(vlist, order, {}):
        n_darts = sum(v * m for v, m in profile.items())
        if n_darts % 2:
            continue
        g_order = sum(profile.values())
        pref = one
        for v, m in profile.items():
            pref = pref * (N * weights[v]) ** m
            pref = pref / Fraction(v ** m * factorial(m))
        avg = gaussian_trace_average(profile, cap=cap, symbols=symbols,
                                     laurent=laurent)
        coeffs[g_order] = coeffs[g_order] + pref * avg
    return TruncSeries("g", coeffs)


def connected_free_energy_F(weights, order, cap=DEFAULT_CAP,
                            symbols=("N",), laurent=("N",)):
    """F = log Z; the N-degree of each nonzero coefficient is exactly 2."""
    z = partition_series_Z(weights, order, cap=cap,
                           symbols=symbols, laurent=laurent)
    f = z.log()
    for k in range(1, order + 1):
        c = f.coeffs[k]
        if isinstance(c, SymbolPoly) and c:
            if max(c.exponents_of("N")) != 2:
                raise MalformedMap("connected coefficient with N-degree != 2")
    return f


def genus_split(f_coeff):
    """Split a Laurent-in-N coefficient into {genus: Fraction}."""
    out = {}
    for e in f_coeff.exponents_of("N"):
        if (2 - e) % 2:
            raise ValueError("odd N exponent %d" % e)
        out[(2 - e) // 2] = f_coeff.coeff(N=e)
    return out
