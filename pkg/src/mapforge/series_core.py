"""Exact coefficient rings and truncated formal power series.

Coefficients are fractions.Fraction values, or SymbolPoly values when the
series carries auxiliary symbols (N as a Laurent symbol, rho/sigma/t as
ordinary ones).  Every operation is exact; floats never enter the algebra.
A series keeps coefficients for degrees 0..order, and binary operations
truncate to the minimum order of the operands.
"""

from fractions import Fraction


class NonUnitDivisor(ArithmeticError):
    pass


class BadConstantTerm(ValueError):
    pass


class NotInvertible(ValueError):
    pass


class NotContracting(RuntimeError):
    pass


def rat_str(q):
    """Render a Fraction (or int) as an exact "p/q" or "p" string."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return "%d/%d" % (q.numerator, q.denominator)


def rat_parse(s):
    return Fraction(s)


class SymbolPoly:
    """Polynomial (Laurent in flagged symbols) with Fraction coefficients.

    terms maps exponent tuples to nonzero Fractions.  The symbol list and
    the set of Laurent-allowed symbols are fixed per instance and must
    agree between operands.
    """

    __slots__ = ("symbols", "laurent", "terms")

    def __init__(self, symbols, terms, laurent=()):
        self.symbols = tuple(symbols)
        self.laurent = frozenset(laurent)
        clean = {}
        for expo, c in terms.items():
            c = Fraction(c)
            if c == 0:
                continue
            expo = tuple(expo)
            for name, e in zip(self.symbols, expo):
                if e < 0 and name not in self.laurent:
                    raise ValueError("negative exponent for non-Laurent symbol %s" % name)
            clean[expo] = c
        self.terms = clean

    @classmethod
    def const(cls, symbols, value, laurent=()):
        z = (0,) * len(tuple(symbols))
        return cls(symbols, {z: Fraction(value)}, laurent)

    @classmethod
    def sym(cls, symbols, name, laurent=()):
        symbols = tuple(symbols)
        expo = tuple(1 if s == name else 0 for s in symbols)
        if name not in symbols:
            raise KeyError(name)
        return cls(symbols, {expo: Fraction(1)}, laurent)

    def _coerce(self, other):
        if isinstance(other, SymbolPoly):
            if other.symbols != self.symbols:
                raise ValueError("symbol mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return SymbolPoly.const(self.symbols, other, self.laurent)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return SymbolPoly(self.symbols, terms, self.laurent | other.laurent)

    __radd__ = __add__

    def __neg__(self):
        return SymbolPoly(self.symbols, {e: -c for e, c in self.terms.items()},
                          self.laurent)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return SymbolPoly(self.symbols, terms, self.laurent | other.laurent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError
            return SymbolPoly(self.symbols,
                              {e: c / Fraction(other) for e, c in self.terms.items()},
                              self.laurent)
        if isinstance(other, SymbolPoly):
            return self * other.inverse()
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            if isinstance(k, int) and k < 0:
                return self.inverse() ** (-k)
            raise TypeError("integer power expected")
        out = SymbolPoly.const(self.symbols, 1, self.laurent)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self):
        """Inverse of a monomial; anything with several terms is not a unit."""
        if len(self.terms) != 1:
            raise NonUnitDivisor("only monomials are invertible")
        (expo, c), = self.terms.items()
        inv_expo = tuple(-e for e in expo)
        for name, e in zip(self.symbols, inv_expo):
            if e < 0 and name not in self.laurent:
                raise NonUnitDivisor("inverse needs Laurent symbol %s" % name)
        return SymbolPoly(self.symbols, {inv_expo: 1 / c}, self.laurent)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SymbolPoly.const(self.symbols, other, self.laurent)
        if not isinstance(other, SymbolPoly):
            return NotImplemented
        return self.symbols == other.symbols and self.terms == other.terms

    def __hash__(self):
        return hash((self.symbols, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_const(self):
        z = (0,) * len(self.symbols)
        return all(e == z for e in self.terms)

    def const_value(self):
        z = (0,) * len(self.symbols)
        return self.terms.get(z, Fraction(0))

    def coeff(self, **expos):
        """Coefficient of a monomial given as symbol=exponent keywords."""
        e = tuple(expos.get(s, 0) for s in self.symbols)
        return self.terms.get(e, Fraction(0))

    def exponents_of(self, name):
        """Sorted set of exponents of one symbol appearing with nonzero terms."""
        i = self.symbols.index(name)
        return sorted({e[i] for e in self.terms})

    def subs(self, **values):
        """Substitute numbers for some symbols; returns SymbolPoly or Fraction."""
        vals = {}
        keep = []
        for s in self.symbols:
            if s in values:
                vals[s] = values[s]
            else:
                keep.append(s)
        if keep:
            out = {}
            for e, c in self.terms.items():
                factor = c
                ke = []
                for s, ei in zip(self.symbols, e):
                    if s in vals:
                        factor = factor * (Fraction(vals[s]) ** ei)
                    else:
                        ke.append(ei)
                ke = tuple(ke)
                out[ke] = out.get(ke, Fraction(0)) + factor
            return SymbolPoly(keep, out, self.laurent & set(keep))
        total = Fraction(0)
        for e, c in self.terms.items():
            factor = c
            for s, ei in zip(self.symbols, e):
                factor = factor * (Fraction(vals[s]) ** ei)
            total += factor
        return total

    def evalf(self, **values):
        total = 0.0
        for e, c in self.terms.items():
            factor = float(c)
            for s, ei in zip(self.symbols, e):
                factor *= float(values[s]) ** ei
            total += factor
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms):
            c = self.terms[e]
            mono = "*".join("%s^%d" % (s, ei) for s, ei in zip(self.symbols, e) if ei)
            if mono:
                bits.append("%s*%s" % (rat_str(c), mono))
            else:
                bits.append(rat_str(c))
        return " + ".join(bits)


def _as_coeff(c):
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    return c


def _coeff_is_zero(c):
    return c == 0


def _coeff_div(a, b):
    """a/b where b must be a unit of the coefficient ring."""
    if isinstance(b, (int, Fraction)):
        if b == 0:
            raise NonUnitDivisor("zero constant term")
        return a / Fraction(b)
    if isinstance(b, SymbolPoly):
        if not b:
            raise NonUnitDivisor("zero constant term")
        inv = b.inverse()
        return inv * a if isinstance(a, (int, Fraction)) else a * inv
    raise TypeError(type(b))


class TruncSeries:
    """Truncated power series in one counting variable, exact coefficients."""

    __slots__ = ("var", "coeffs")

    def __init__(self, var, coeffs):
        self.var = var
        self.coeffs = [_as_coeff(c) for c in coeffs]
        if not self.coeffs:
            raise ValueError("need at least the constant term")

    @classmethod
    def zero(cls, var, order):
        return cls(var, [Fraction(0)] * (order + 1))

    @classmethod
    def const(cls, var, value, order):
        c = [_as_coeff(value)] + [Fraction(0)] * order
        return cls(var, c)

    @classmethod
    def gen(cls, var, order):
        """The series x + O(x^{order+1})."""
        c = [Fraction(0)] * (order + 1)
        if order >= 1:
            c[1] = Fraction(1)
        return cls(var, c)

    @property
    def order(self):
        return len(self.coeffs) - 1

    def coeff(self, k):
        if k < 0:
            return Fraction(0)
        if k > self.order:
            raise IndexError("coefficient beyond truncation order")
        return self.coeffs[k]

    def truncate(self, order):
        if order >= self.order:
            return TruncSeries(self.var, self.coeffs + [Fraction(0)] * (order - self.order))
        return TruncSeries(self.var, self.coeffs[:order + 1])

    def _match(self, other):
        if isinstance(other, TruncSeries):
            if other.var != self.var:
                raise ValueError("variable mismatch")
            n = min(self.order, other.order)
            return self.coeffs[:n + 1], other.coeffs[:n + 1]
        if isinstance(other, (int, Fraction, SymbolPoly)):
            o = [_as_coeff(other)] + [Fraction(0)] * self.order
            return list(self.coeffs), o
        return None, None

    def __add__(self, other):
        a, b = self._match(other)
        if a is None:
            return NotImplemented
        return TruncSeries(self.var, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.var, [-c for c in self.coeffs])

    def __sub__(self, other):
        a, b = self._match(other)
        if a is None:
            return NotImplemented
        return TruncSeries(self.var, [x - y for x, y in zip(a, b)])

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, SymbolPoly)):
            o = _as_coeff(other)
            return TruncSeries(self.var, [c * o for c in self.coeffs])
        a, b = self._match(other)
        if a is None:
            return NotImplemented
        n = len(a) - 1
        out = [Fraction(0)] * (n + 1)
        for i, x in enumerate(a):
            if _coeff_is_zero(x):
                continue
            for j in range(0, n - i + 1):
                y = b[j]
                if _coeff_is_zero(y):
                    continue
                out[i + j] = out[i + j] + x * y
        return TruncSeries(self.var, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError
            inv = Fraction(1) / Fraction(other)
            return self * inv
        if isinstance(other, SymbolPoly):
            return self * other.inverse()
        a, b = self._match(other)
        if a is None:
            return NotImplemented
        if _coeff_is_zero(b[0]):
            raise NonUnitDivisor("division by series with zero constant term")
        n = len(a) - 1
        out = []
        for k in range(n + 1):
            acc = a[k]
            for j in range(k):
                acc = acc - out[j] * b[k - j]
            out.append(_coeff_div(acc, b[0]))
        return TruncSeries(self.var, out)

    def __rtruediv__(self, other):
        return TruncSeries.const(self.var, other, self.order) / self

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("use pow_frac for fractional powers")
        if k < 0:
            return (1 / self) ** (-k)
        out = TruncSeries.const(self.var, 1, self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        a, b = self._match(other)
        if a is None:
            return NotImplemented
        return all(x == y for x, y in zip(a, b))

    def __repr__(self):
        bits = []
        for k, c in enumerate(self.coeffs):
            if not _coeff_is_zero(c):
                bits.append("(%r)*%s^%d" % (c, self.var, k))
        body = " + ".join(bits) if bits else "0"
        return "%s + O(%s^%d)" % (body, self.var, self.order + 1)

    def is_zero(self):
        return all(_coeff_is_zero(c) for c in self.coeffs)

    def valuation(self):
        for k, c in enumerate(self.coeffs):
            if not _coeff_is_zero(c):
                return k
        return self.order + 1

    def map_coeffs(self, f):
        return TruncSeries(self.var, [f(c) for c in self.coeffs])

    def eval_float(self, x):
        """Horner evaluation with float conversion at the boundary."""
        total = 0.0
        for c in reversed(self.coeffs):
            total = total * x + float(c)
        return total

    def to_strings(self):
        out = []
        for c in self.coeffs:
            if isinstance(c, SymbolPoly):
                out.append(repr(c))
            else:
                out.append(rat_str(c))
        return out

    # elementary functions

    def log(self):
        if self.coeffs[0] != 1:
            raise BadConstantTerm("log needs constant term 1")
        x = self - 1
        return _alternating_sum(x, lambda k: Fraction((-1) ** (k + 1), k))

    def exp(self):
        if not _coeff_is_zero(self.coeffs[0]):
            raise BadConstantTerm("exp needs constant term 0")
        out = TruncSeries.const(self.var, 1, self.order)
        term = TruncSeries.const(self.var, 1, self.order)
        for k in range(1, self.order + 1):
            term = term * self / k
            out = out + term
        return out

    def sqrt(self):
        return self.pow_frac(Fraction(1, 2))

    def pow_frac(self, r):
        """(series)^r for rational r, constant term must be 1."""
        if self.coeffs[0] != 1:
            raise BadConstantTerm("pow needs constant term 1")
        r = Fraction(r)
        x = self - 1
        out = TruncSeries.const(self.var, 1, self.order)
        term = TruncSeries.const(self.var, 1, self.order)
        binom = Fraction(1)
        for k in range(1, self.order + 1):
            binom = binom * (r - (k - 1)) / k
            term = term * x
            out = out + term * binom
        return out

    def compose(self, inner):
        """self(inner); inner must have zero constant term."""
        if not isinstance(inner, TruncSeries):
            raise TypeError("inner must be a series")
        if not _coeff_is_zero(inner.coeffs[0]):
            raise BadConstantTerm("composition needs zero inner constant term")
        n = min(self.order, inner.order)
        out = TruncSeries.const(inner.var, 0, n)
        for c in reversed(self.coeffs[:n + 1]):
            out = out * inner.truncate(n) + c
        return out

    def reversion(self):
        """Compositional inverse via Lagrange inversion."""
        if not _coeff_is_zero(self.coeffs[0]):
            raise NotInvertible("reversion needs zero constant term")
        if self.order < 1 or _coeff_is_zero(self.coeffs[1]):
            raise NotInvertible("reversion needs nonzero linear term")
        n = self.order
        # q = z/a(z), unit constant term
        q = TruncSeries(self.var, self.coeffs[1:] + [Fraction(0)])
        q = 1 / q
        p = TruncSeries.const(self.var, 1, n - 1)
        coeffs = [Fraction(0)] * (n + 1)
        for k in range(1, n + 1):
            p = p * q
            coeffs[k] = _coeff_div(p.coeff(k - 1), k)
        return TruncSeries(self.var, coeffs)

    def derivative(self):
        if self.order == 0:
            return TruncSeries.zero(self.var, 0)
        return TruncSeries(self.var,
                           [k * c for k, c in enumerate(self.coeffs)][1:] + [Fraction(0)])

    def integrate(self):
        """Antiderivative with zero constant term, same truncation order."""
        out = [Fraction(0)]
        for k, c in enumerate(self.coeffs[:-1]):
            out.append(_coeff_div(c, k + 1))
        return TruncSeries(self.var, out)


def _alternating_sum(x, coeff_fn):
    out = TruncSeries.const(x.var, 0, x.order)
    term = TruncSeries.const(x.var, 1, x.order)
    for k in range(1, x.order + 1):
        term = term * x
        out = out + term * coeff_fn(k)
    return out


def ring_arith(a, b, op):
    """Dispatch named arithmetic; kept for the documented operation table."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(op)


def elementary(a, fn, r=None):
    if fn == "log":
        return a.log()
    if fn == "exp":
        return a.exp()
    if fn == "sqrt":
        return a.sqrt()
    if fn == "pow":
        return a.pow_frac(r)
    raise ValueError(fn)


def fixed_point_solve(equation, seed, order, var="g"):
    """Solve X = equation(X) when the map is triangular in the degree.

    Starts from the constant seed and iterates; each pass fixes at least one
    further order, so order+2 passes suffice.  A final re-application must
    reproduce X exactly, otherwise the dependence was not triangular.
    """
    x = TruncSeries.const(var, seed, order)
    for _ in range(order + 2):
        nxt = equation(x)
        if not isinstance(nxt, TruncSeries):
            nxt = TruncSeries.const(var, nxt, order)
        x = nxt.truncate(order)
    check = equation(x)
    if not isinstance(check, TruncSeries):
        check = TruncSeries.const(var, check, order)
    if check.truncate(order) != x:
        raise NotContracting("fixed point iteration did not stabilize")
    return x
