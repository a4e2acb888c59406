"""All-genus free energy via orthogonal polynomials.

The squared norms h_m of the monic orthogonal polynomials for the measure
exp(-N V(x)) dx are computed exactly as ratios of Hankel determinants of
the moments, with N carried as a Laurent symbol.  The free energy is the
normalized log ratio against the Gaussian measure,

    F = sum_{m=0}^{N-1} log(h_m / h_m^0)
      = N log(h_0/h_0^0) + sum_{m=1}^{N-1} (N-m) log(N r_m / m),

and the upper limit N is handled symbolically: at each g-order the
summand is a polynomial in m (checked by stabilization between window
sizes M and M+1), so the sum is done with Bernoulli/Faulhaber formulas.
"""

from fractions import Fraction
from math import comb, factorial

from .series_core import SymbolPoly, TruncSeries
from .planar_onecut import EvenOnly

NSYM = ("N",)
NLAU = ("N",)


class IncreaseM(RuntimeError):
    pass


class StructureViolation(ValueError):
    pass


class DegenerateMeasure(ValueError):
    pass


class NoPhysicalRoot(ValueError):
    pass


def _npoly(value=0):
    return SymbolPoly.const(NSYM, value, NLAU)


def _N(power=1):
    return SymbolPoly(NSYM, {(power,): Fraction(1)}, NLAU)


def _double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def moments_from_potential(couplings, order, top):
    """Moments nu_k, k = 0..top, of exp(-NV) normalized by the Gaussian.

    couplings: valence -> Fraction for an even potential; each vertex
    insertion carries one power of g and the factor N g_i / i.
    Gaussian moments are (m-1)!! N^{-m/2}.
    """
    for v in couplings:
        if v % 2:
            raise EvenOnly("moments implemented for even potentials")
    valences = sorted(v for v in couplings if couplings[v] != 0)
    table = []
    for k in range(top + 1):
        coeffs = [_npoly() for _ in range(order + 1)]
        for profile in _insertion_profiles(valences, order):
            n = sum(profile.values())
            m = k + sum(v * c for v, c in profile.items())
            if m % 2:
                continue
            pref = _npoly(1)
            for v, c in profile.items():
                pref = pref * (_N() * couplings[v] / v) ** c / factorial(c)
            gauss = _double_factorial(m - 1) * _N(-m // 2) if m else _npoly(1)
            coeffs[n] = coeffs[n] + pref * gauss
        table.append(TruncSeries("g", coeffs))
    return table


def _insertion_profiles(valences, budget):
    out = {}

    def rec(i, left):
        if i == len(valences):
            yield dict(out)
            return
        for c in range(left + 1):
            if c:
                out[valences[i]] = c
            yield from rec(i + 1, left - c)
            out.pop(valences[i], None)

    yield from rec(0, budget)


def hankel_dets(moments, M):
    """Determinants D_1..D_M of the leading Hankel blocks (nu_{i+j})."""
    dets = []
    for size in range(1, M + 1):
        mat = [[moments[i + j] for j in range(size)] for i in range(size)]
        dets.append(_det_series(mat))
    return dets


def _det_series(mat):
    """Gaussian elimination; pivots stay invertible because the g=0 matrix
    is the Hankel matrix of a positive measure."""
    n = len(mat)
    mat = [row[:] for row in mat]
    det = None
    for k in range(n):
        piv = mat[k][k]
        pc = piv.coeffs[0]
        if (isinstance(pc, SymbolPoly) and not pc) or pc == 0:
            raise DegenerateMeasure("zero pivot in Hankel elimination")
        det = piv if det is None else det * piv
        for i in range(k + 1, n):
            factor = mat[i][k] / piv
            for j in range(k, n):
                mat[i][j] = mat[i][j] - factor * mat[k][j]
    return det


def hankel_norms(couplings, order, M):
    """h_m for m = 0..M-1 (normalized by the Gaussian partition integral)
    and the ratios r_m = h_m / h_{m-1} for m = 1..M-1."""
    moments = moments_from_potential(couplings, order, 2 * M)
    dets = hankel_dets(moments, M)
    h = [dets[0]]
    for m in range(1, M):
        h.append(dets[m] / dets[m - 1])
    r = [None]
    for m in range(1, M):
        r.append(h[m] / h[m - 1])
    return h, r


def gaussian_h(m):
    """h_m for the Gaussian weight, same normalization: m! N^{-m}."""
    return _npoly(factorial(m)) * _N(-m)


def log_ratio_terms(couplings, order, M):
    """gamma0 = log(h_0/h_0^0) and lam[m] = log(N r_m / m), m = 1..M-1."""
    h, r = hankel_norms(couplings, order, M)
    gamma0 = h[0].log()
    lam = [None]
    for m in range(1, M):
        lam.append((r[m] * _N() / m).log())
    return gamma0, lam


def string_recursion_residual(couplings, r_window, m):
    """m/N minus the V'(Q) path sum from m to m-1; zero for true solutions.

    r_window maps index -> series; paths live on the non-negative integers
    with weight r_p per down step from height p.
    """
    order = r_window[m].order
    g = TruncSeries.gen("g", order)
    acc = _path_sum(r_window, m, 1, order)
    for v, gi in couplings.items():
        acc = acc - g * gi * _path_sum(r_window, m, v - 1, order)
    target = TruncSeries.const("g", _N(-1) * m, order)
    return acc - target


def _path_sum(r_window, start, steps, order):
    """Sum over +-1 paths of given length from start to start-1, heights >= 0."""
    total = TruncSeries.const("g", _npoly(), order)

    def rec(h, left, weight):
        nonlocal total
        if left == 0:
            if h == start - 1:
                total = total + weight
            return
        if h + left < start - 1 or h - left > start - 1:
            return
        rec(h + 1, left - 1, weight)
        if h > 0:
            rec(h - 1, left - 1, weight * r_window[h])

    rec(start, steps, TruncSeries.const("g", _npoly(1), order))
    return total


def bernoulli_numbers(top):
    B = [Fraction(1)]
    for k in range(1, top + 1):
        acc = Fraction(0)
        for i in range(k):
            acc += comb(k + 1, i) * B[i]
        B.append(-acc / (k + 1))
    return B


def power_sum_poly(j):
    """sum_{m=0}^{n-1} m^j as coefficients [n^0 ... n^{j+1}]."""
    B = bernoulli_numbers(j)
    out = [Fraction(0)] * (j + 2)
    for i in range(j + 1):
        out[j + 1 - i] += Fraction(comb(j + 1, i), j + 1) * B[i]
    return out


def _newton_fit(samples, lo):
    """Interpolating polynomial through samples[lo..], as monomial coeffs in m.

    samples is a dict m -> SymbolPoly.  Returns the coefficient list; the
    caller is responsible for checking the fit against held-out samples.
    """
    ms = sorted(samples)
    diffs = [samples[m] for m in ms]
    # forward differences at base lo (unit spacing)
    table = [diffs]
    while len(table[-1]) > 1:
        prev = table[-1]
        table.append([prev[i + 1] - prev[i] for i in range(len(prev) - 1)])
    # Newton form: sum_d delta_d * C(m - lo, d)
    coeffs = [_npoly()]
    falling = [Fraction(1)]          # polynomial in m, monomial coeffs
    for d, row in enumerate(table):
        delta = row[0]
        if d:
            # falling *= (m - lo - (d-1)) / d
            shifted = [Fraction(0)] + falling
            const = Fraction(lo + d - 1)
            falling = [shifted[i] - (falling[i] if i < len(falling) else 0) * const
                       for i in range(len(shifted))]
            falling = [c / d for c in falling]
        while len(coeffs) < len(falling):
            coeffs.append(_npoly())
        if isinstance(delta, SymbolPoly) and not delta:
            continue
        if not isinstance(delta, SymbolPoly) and delta == 0:
            continue
        for i, c in enumerate(falling):
            coeffs[i] = coeffs[i] + delta * c
    return coeffs


def _poly_eval(coeffs, m):
    acc = _npoly()
    p = 1
    for c in coeffs:
        acc = acc + c * p
        p *= m
    return acc


def exact_free_energy_FN(couplings, order, M=None):
    """F_N = log(Z_N(V)/Z_N(V0)) as a series in g, Laurent polynomial in N.

    The summand log(N r_m/m) is interpolated as a polynomial in m and the
    sum to N-1 is done symbolically; identical results for window sizes M
    and M+1 are required, otherwise IncreaseM is raised.
    """
    if M is None:
        M = 2 * order + 6
    big = exact_free_energy_fixed_window(couplings, order, M + 1)
    small = exact_free_energy_fixed_window(couplings, order, M)
    if big != small:
        raise IncreaseM("free energy did not stabilize at window %d" % M)
    return big


def exact_free_energy_fixed_window(couplings, order, M):
    gamma0, lam = log_ratio_terms(couplings, order, M)
    coeffs = [_npoly()]
    for k in range(1, order + 1):
        samples = {}
        for m in range(1, M):
            c = lam[m].coeffs[k]
            samples[m] = c if isinstance(c, SymbolPoly) else _npoly(c)
        fit_deg = min(2 * k, M - 3)
        fit = _newton_fit({m: samples[m] for m in range(1, fit_deg + 2)}, 1)
        for m in range(1, M):
            if _poly_eval(fit, m) != samples[m]:
                raise IncreaseM("summand not polynomial across the window")
        total = _sum_weighted(fit)
        g0k = gamma0.coeffs[k]
        if not isinstance(g0k, SymbolPoly):
            g0k = _npoly(g0k)
        coeffs.append(total + _N() * g0k)
    return TruncSeries("g", coeffs)


def _sum_weighted(fit):
    """sum_{m=1}^{N-1} (N - m) P(m) with N symbolic."""
    total = _npoly()
    for j, c in enumerate(fit):
        if isinstance(c, SymbolPoly) and not c:
            continue
        sj = _faulhaber_poly(j)
        sj1 = _faulhaber_poly(j + 1)
        total = total + c * (_N() * sj - sj1)
    # remove the m = 0 term of the closed sums
    total = total - _N() * fit[0]
    return total


def _faulhaber_poly(j):
    coeffs = power_sum_poly(j)
    acc = _npoly()
    for e, q in enumerate(coeffs):
        if q:
            acc = acc + q * _N(e)
    return acc


def genus_extract(F):
    """{(g-order, genus): coefficient}; only N-exponents 2,0,-2,... allowed."""
    out = {}
    for k in range(1, F.order + 1):
        c = F.coeffs[k]
        if not isinstance(c, SymbolPoly) or not c:
            continue
        exps = c.exponents_of("N")
        if max(exps) > 2:
            raise StructureViolation("N-exponent above 2 at order %d" % k)
        for e in exps:
            if (2 - e) % 2:
                raise StructureViolation("odd N-exponent %d at order %d" % (e, k))
            out[(k, (2 - e) // 2)] = c.coeff(N=e)
    return out


def genus_one_closed_form(order):
    """(1/24) sum_{n>=1} g^n/n 3^n (4^n - C(2n,n))."""
    coeffs = [Fraction(0)]
    for n in range(1, order + 1):
        coeffs.append(Fraction(3 ** n * (4 ** n - comb(2 * n, n)), 24 * n))
    return TruncSeries("g", coeffs)


def two_marked_faces(couplings, order):
    """Generating function with two marked faces: log R from the even
    fixed point R = 1 + sum g_{2k} C(2k-1,k) R^k."""
    from .series_core import fixed_point_solve

    for v in couplings:
        if v % 2:
            raise EvenOnly("even potentials only")
    g = TruncSeries.gen("g", order)

    def eq(x):
        acc = TruncSeries.const("g", 1, order)
        for v, gi in couplings.items():
            k = v // 2
            acc = acc + g * gi * comb(2 * k - 1, k) * x ** k
        return acc

    return fixed_point_solve(eq, 1, order).log()


class CriticalPoint:
    """Multicritical data in the rescaled variable rho = g r."""

    def __init__(self, m, rho_c, params, g_t_c):
        self.m = m
        self.rho_c = rho_c        # g * r_c
        self.params = params      # solved free parameters
        self.g_t_c = g_t_c        # g * t_c = psi(rho_c)
        self.gamma = Fraction(-1, m + 1)


def multicritical_solve(psi_coeffs, m):
    """Tune psi(rho) = sum_k a_k rho^k so its first m derivatives vanish.

    psi_coeffs maps power -> Fraction, or -> (name, Fraction multiplier)
    for a free parameter entering linearly.  Supported: m = 1 with no free
    parameter, m = 2 with exactly one.  rho is g*r; g t_c = psi(rho_c).
    """
    fixed = {k: v for k, v in psi_coeffs.items() if not isinstance(v, tuple)}
    free = {k: v for k, v in psi_coeffs.items() if isinstance(v, tuple)}

    def dcoeff(k, j):
        # k-th power contributes k!/(k-j)! rho^{k-j} to the j-th derivative
        if k < j:
            return Fraction(0)
        return Fraction(factorial(k), factorial(k - j))

    if m == 1 and not free:
        # psi'(rho) = 0, polynomial in rho with rational coefficients
        poly = {}
        for k, a in fixed.items():
            if k >= 1:
                poly[k - 1] = poly.get(k - 1, Fraction(0)) + a * dcoeff(k, 1)
        root = _positive_rational_root(poly)
        if root is None:
            raise NoPhysicalRoot("no positive critical point")
        gt = sum(a * root ** k for k, a in fixed.items())
        return CriticalPoint(1, root, {}, gt)
    if m == 2 and len(free) == 1:
        (kp, (pname, mult)), = free.items()
        # psi''(rho) = 0 is linear in the parameter: solve and substitute
        # into psi'(rho) = 0, clearing the rho denominator.
        # psi'' = sum fixed a_k k(k-1) rho^{k-2} + p mult kp(kp-1) rho^{kp-2}
        # p(rho) = -fixed''(rho) / (mult kp(kp-1) rho^{kp-2})
        # psi'(rho) * rho^{kp-2} stays polynomial after substitution.
        num = {}   # p * denominator as polynomial in rho
        for k, a in fixed.items():
            if k >= 2:
                num[k - 2] = num.get(k - 2, Fraction(0)) - a * dcoeff(k, 2)
        denom_pow = kp - 2
        denom_mult = mult * dcoeff(kp, 2)
        # psi' with p substituted, multiplied by denom_mult * rho^{denom_pow}
        poly = {}
        for k, a in fixed.items():
            if k >= 1:
                e = k - 1 + denom_pow
                poly[e] = poly.get(e, Fraction(0)) + a * dcoeff(k, 1) * denom_mult
        for e, q in num.items():
            ee = e + kp - 1
            poly[ee] = poly.get(ee, Fraction(0)) + q * mult * dcoeff(kp, 1)
        root = _positive_rational_root(poly)
        if root is None:
            raise NoPhysicalRoot("no positive critical point")
        pval = sum(q * root ** e for e, q in num.items()) \
            / (denom_mult * root ** denom_pow)
        gt = sum(a * root ** k for k, a in fixed.items()) \
            + pval * mult * root ** kp
        # third derivative must not vanish for a genuine m = 2 point
        third = sum(a * dcoeff(k, 3) * root ** (k - 3)
                    for k, a in fixed.items() if k >= 3) \
            + pval * mult * dcoeff(kp, 3) * root ** (kp - 3)
        if third == 0:
            raise NoPhysicalRoot("degenerate beyond order 2")
        return CriticalPoint(2, root, {pname: pval}, gt)
    raise NotImplementedError("unsupported multicritical configuration")


def _positive_rational_root(poly):
    """Smallest positive rational root of sum poly[e] rho^e, exact search."""
    poly = {e: q for e, q in poly.items() if q != 0}
    if not poly:
        return None
    low = min(poly)
    if low:
        poly = {e - low: q for e, q in poly.items()}
    deg = max(poly)
    if deg == 0:
        return None
    # clear denominators
    from math import lcm
    den = 1
    for q in poly.values():
        den = lcm(den, q.denominator)
    ip = {e: int(q * den) for e, q in poly.items()}
    a0, ad = abs(ip.get(0, 0)), abs(ip[deg])
    if a0 == 0:
        return None
    roots = []
    for p in _divisors(a0):
        for q in _divisors(ad):
            cand = Fraction(p, q)
            if sum(c * cand ** e for e, c in ip.items()) == 0:
                roots.append(cand)
    return min(roots) if roots else None


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def pure_gravity_quartic():
    """m=1 point of psi(rho) = rho - 3 rho^2: rho_c = 1/6, g t_c = 1/12."""
    return multicritical_solve({1: Fraction(1), 2: Fraction(-3)}, 1)


def hard_dimer():
    """m=2 point of psi(rho) = rho - 3 rho^2 - 30 z rho^3."""
    return multicritical_solve(
        {1: Fraction(1), 2: Fraction(-3), 3: ("z", Fraction(-30))}, 2)
