"""Exact coefficient arithmetic: sparse Laurent polynomials over the integers,
their fractions, truncated q-series, and rational-in-q pairing values.

Every ring element here is immutable and canonical: equal values have equal
internal maps, so dict/set membership works everywhere downstream.

A LaurentScalar is a sparse map exponent-tuple -> integer.  The number of
slots is fixed per value; modules agree on a slot layout out-of-band (the
equivariant layout used throughout the package is (q, y, e_1..e_n)).
Monomial order is lexicographic on exponent tuples, largest tuple leading.
"""

import heapq
import json
from functools import lru_cache
from math import gcd


class DimensionError(ValueError):
    pass


class DivisibilityError(ArithmeticError):
    pass


class NonUnitError(ArithmeticError):
    pass


class LaurentScalar:
    """Sparse Laurent polynomial in ``nv`` variables with int coefficients."""

    __slots__ = ("nv", "terms", "_hash")

    def __init__(self, nv, terms=None):
        self.nv = nv
        clean = {}
        if terms:
            for exp, c in terms.items():
                if c:
                    clean[tuple(exp)] = c
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------

    @classmethod
    def const(cls, nv, c):
        if c == 0:
            return cls(nv)
        return cls(nv, {(0,) * nv: c})

    @classmethod
    def monomial(cls, nv, slot, power=1, coef=1):
        exp = [0] * nv
        exp[slot] = power
        return cls(nv, {tuple(exp): coef})

    # -- predicates ----------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_one(self):
        return self.terms == {(0,) * self.nv: 1}

    def is_constant(self):
        return not self.terms or self.terms.keys() == {(0,) * self.nv}

    def constant_value(self):
        return self.terms.get((0,) * self.nv, 0)

    def is_monomial(self):
        return len(self.terms) == 1

    # -- ring operations ------------------------------------------------

    def _check(self, other):
        if isinstance(other, int):
            other = LaurentScalar.const(self.nv, other)
        if not isinstance(other, LaurentScalar):
            return NotImplemented
        if other.nv != self.nv:
            raise DimensionError(
                "mixed variable counts: %d vs %d" % (self.nv, other.nv))
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for exp, c in other.terms.items():
            s = out.get(exp, 0) + c
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        r = LaurentScalar(self.nv)
        r.terms = out
        return r

    __radd__ = __add__

    def __neg__(self):
        r = LaurentScalar(self.nv)
        r.terms = {e: -c for e, c in self.terms.items()}
        return r

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (RatScalar, QSeries)):
            return other * self
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.terms or not other.terms:
            return LaurentScalar(self.nv)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out = {}
        for eb, cb in b.items():
            for ea, ca in a.items():
                exp = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(exp, 0) + ca * cb
                if s:
                    out[exp] = s
                else:
                    del out[exp]
        r = LaurentScalar(self.nv)
        r.terms = out
        return r

    __rmul__ = __mul__

    def __pow__(self, p):
        if p < 0:
            if not self.is_monomial():
                raise NonUnitError("negative power of a non-monomial")
            (exp, c), = self.terms.items()
            if c not in (1, -1):
                raise NonUnitError("negative power of a non-unit coefficient")
            base = LaurentScalar(self.nv, {tuple(-x for x in exp): c})
            return base ** (-p)
        out = LaurentScalar.const(self.nv, 1)
        base = self
        while p:
            if p & 1:
                out = out * base
            base = base * base if p > 1 else base
            p >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_constant() and self.constant_value() == other
        if isinstance(other, LaurentScalar):
            return self.nv == other.nv and self.terms == other.terms
        if isinstance(other, RatScalar):
            return other == self
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nv, frozenset(self.terms.items())))
        return self._hash

    # -- structure ------------------------------------------------------

    def leading(self):
        """(exponent, coefficient) of the lex-largest monomial."""
        exp = max(self.terms)
        return exp, self.terms[exp]

    def content(self):
        g = 0
        for c in self.terms.values():
            g = gcd(g, c)
            if g == 1:
                return 1
        return g

    def exponent_box(self):
        """Per-slot (min, max) exponent over all terms; None when zero."""
        if not self.terms:
            return None
        lo = [None] * self.nv
        hi = [None] * self.nv
        for exp in self.terms:
            for i, e in enumerate(exp):
                if lo[i] is None or e < lo[i]:
                    lo[i] = e
                if hi[i] is None or e > hi[i]:
                    hi[i] = e
        return lo, hi

    def degree_in(self, slot):
        if not self.terms:
            return None
        return max(e[slot] for e in self.terms)

    def valuation_in(self, slot):
        if not self.terms:
            return None
        return min(e[slot] for e in self.terms)

    def coefficient_of(self, slot, power):
        """Coefficient of (slot variable)^power, as a Laurent with that slot zeroed."""
        out = {}
        for exp, c in self.terms.items():
            if exp[slot] == power:
                e = list(exp)
                e[slot] = 0
                out[tuple(e)] = c
        return LaurentScalar(self.nv, out)

    # -- substitutions ----------------------------------------------------

    def permute_slots(self, image):
        """Relabel variables: slot i becomes slot image[i] (a bijection)."""
        out = {}
        for exp, c in self.terms.items():
            e = [0] * self.nv
            for i, x in enumerate(exp):
                e[image[i]] += x
            out[tuple(e)] = c
        r = LaurentScalar(self.nv)
        r.terms = out
        return r

    def reverse_invert_slots(self, lo, hi):
        """Map variable at slot i to the inverse of the one at lo+hi-1-i,
        for slots in [lo, hi); other slots untouched."""
        out = {}
        for exp, c in self.terms.items():
            e = list(exp)
            seg = exp[lo:hi]
            e[lo:hi] = [-x for x in reversed(seg)]
            out[tuple(e)] = c
        r = LaurentScalar(self.nv)
        r.terms = out
        return r

    def extend(self, nv_new, offset):
        """Reinterpret in a wider layout, old slot i becoming offset+i."""
        if nv_new == self.nv and offset == 0:
            return self
        out = {}
        for exp, c in self.terms.items():
            e = [0] * nv_new
            e[offset:offset + self.nv] = exp
            out[tuple(e)] = c
        return LaurentScalar(nv_new, out)

    def evaluate(self, values, one):
        """Substitute values[i] for slot i; ``one`` is the target ring's 1.

        Negative exponents require the value to support negative
        integer powers (monomial Laurents, RatScalar, unit QSeries).
        """
        total = None
        for exp, c in self.terms.items():
            term = one * c
            for i, e in enumerate(exp):
                if e:
                    term = term * (values[i] ** e)
            total = term if total is None else total + term
        if total is None:
            return one * 0
        return total

    # -- division ----------------------------------------------------------

    def exact_divide(self, den):
        """Exact quotient self/den in the Laurent ring; DivisibilityError otherwise.

        Leading terms are peeled under lex order.  A coordinatewise Newton-box
        guard bounds every legal quotient exponent, so failure terminates;
        an empty remainder at the end is exactness itself.
        """
        den = self._check(den)
        if den.is_zero():
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if self.is_zero():
            return LaurentScalar(self.nv)
        nlo, nhi = self.exponent_box()
        dlo, dhi = den.exponent_box()
        blo = [a - b for a, b in zip(nlo, dlo)]
        bhi = [a - b for a, b in zip(nhi, dhi)]
        dexp, dcoef = den.leading()
        dterms = list(den.terms.items())
        rem = dict(self.terms)
        heap = [tuple(-x for x in e) for e in rem]
        heapq.heapify(heap)
        quot = {}
        while rem:
            while heap:
                exp = tuple(-x for x in heap[0])
                if exp in rem:
                    break
                heapq.heappop(heap)
            c = rem[exp]
            if c % dcoef:
                raise DivisibilityError("leading coefficient does not divide")
            qexp = tuple(a - b for a, b in zip(exp, dexp))
            for i, e in enumerate(qexp):
                if e < blo[i] or e > bhi[i]:
                    raise DivisibilityError("quotient exponent outside Newton box")
            qc = c // dcoef
            quot[qexp] = qc
            for de, dc in dterms:
                e = tuple(a + b for a, b in zip(qexp, de))
                s = rem.get(e, 0) - qc * dc
                if s:
                    if e not in rem:
                        heapq.heappush(heap, tuple(-x for x in e))
                    rem[e] = s
                else:
                    rem.pop(e, None)
        return LaurentScalar(self.nv, quot)

    def divides(self, other):
        try:
            other.exact_divide(self)
            return True
        except (DivisibilityError, ZeroDivisionError):
            return False

    # -- rendering / serialization ------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: t[0], reverse=True)

    def render(self, names=None):
        if not self.terms:
            return "0"
        names = names or ["x%d" % i for i in range(self.nv)]
        parts = []
        for exp, c in self.sorted_terms():
            factors = []
            for i, e in enumerate(exp):
                if e == 1:
                    factors.append(names[i])
                elif e:
                    factors.append("%s^%d" % (names[i], e))
            body = "*".join(factors)
            if not body:
                parts.append("%+d" % c)
            elif c == 1:
                parts.append("+%s" % body)
            elif c == -1:
                parts.append("-%s" % body)
            else:
                parts.append("%+d*%s" % (c, body))
        s = " ".join(parts)
        return s[1:] if s.startswith("+") else s

    def __repr__(self):
        return "LaurentScalar(%d, %s)" % (self.nv, self.render())

    def to_json(self, var_names=None):
        doc = {
            "n": self.nv,
            "terms": [{"exp": list(e), "coef": str(c)}
                      for e, c in self.sorted_terms()],
        }
        if var_names is not None:
            doc["vars"] = list(var_names)
        return doc

    @classmethod
    def from_json(cls, doc):
        return cls(doc["n"], {tuple(t["exp"]): int(t["coef"])
                              for t in doc["terms"]})


def laurent_arith(a, b, op):
    """Named entry point for {add, sub, mul} on LaurentScalar values."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError("unknown op %r" % (op,))


def exact_divide(a, b):
    return a.exact_divide(b)


_sym_rings = {}


def _sym_ring(nv):
    if nv not in _sym_rings:
        from sympy import ZZ
        from sympy.polys.rings import ring
        gens = ",".join("g%d" % i for i in range(nv))
        _sym_rings[nv] = ring(gens, ZZ)[0]
    return _sym_rings[nv]


def _poly_part(a):
    """Drop the monomial unit: shift exponents so every minimum is zero."""
    lo, _ = a.exponent_box()
    if not any(lo):
        return a
    r = LaurentScalar(a.nv)
    r.terms = {tuple(e - l for e, l in zip(exp, lo)): c
               for exp, c in a.terms.items()}
    return r


@lru_cache(maxsize=8192)
def _poly_gcd_shifted(a, b):
    ring = _sym_ring(a.nv)
    g = ring.from_dict(a.terms).gcd(ring.from_dict(b.terms))
    r = LaurentScalar(a.nv)
    r.terms = {tuple(m): int(c) for m, c in g.terms()}
    return r


def _poly_gcd(a, b):
    """Gcd of the polynomial parts of two scalars; monomial units count as 1.

    Results are cached: the same few denominators show up over and over in
    series arithmetic, and the gcd call is by far the most expensive step.
    """
    if a.is_monomial() or b.is_monomial():
        return LaurentScalar.const(a.nv, 1)
    return _poly_gcd_shifted(_poly_part(a), _poly_part(b))


@lru_cache(maxsize=8192)
def _div_cached(a, b):
    return a.exact_divide(b)


def _gcd_cancel(num, den):
    """Cancel the polynomial gcd of a fraction, leaving monomials alone."""
    g = _poly_gcd(num, den)
    if g.is_one():
        return num, den
    return _div_cached(num, g), _div_cached(den, g)


class RatScalar:
    """Fraction of two LaurentScalars, kept in a normal form.

    Normalization: common integer content removed, a monomial shift making
    every denominator exponent minimal at zero, denominator leading
    coefficient positive.  When the denominator divides the numerator the
    value collapses to denominator one, so a/a == 1 structurally.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _normalized=False, _coprime=False):
        if isinstance(num, int):
            num = LaurentScalar.const(den.nv if den is not None else 0, num)
        if den is None:
            den = LaurentScalar.const(num.nv, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.nv != den.nv:
            raise DimensionError("fraction with mixed variable counts")
        if not _normalized:
            num, den = self._normalize(num, den, _coprime)
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def _normalize(num, den, coprime=False):
        if num.is_zero():
            return num, LaurentScalar.const(num.nv, 1)
        if not coprime and not den.is_one():
            try:
                num = num.exact_divide(den)
                den = LaurentScalar.const(num.nv, 1)
            except DivisibilityError:
                pass
        if not coprime and not den.is_one() and len(den.terms) > 1 \
                and num.nv > 0:
            num, den = _gcd_cancel(num, den)
        if not den.is_one():
            g = gcd(num.content(), den.content())
            lo, _ = den.exponent_box()
            shift = tuple(-x for x in lo)
            neg = den.leading()[1] < 0
            if g > 1 or any(shift) or neg:
                sgn = -1 if neg else 1
                nt = {tuple(a + b for a, b in zip(e, shift)): sgn * c // g
                      for e, c in num.terms.items()}
                dt = {tuple(a + b for a, b in zip(e, shift)): sgn * c // g
                      for e, c in den.terms.items()}
                num = LaurentScalar(num.nv, nt)
                den = LaurentScalar(den.nv, dt)
        return num, den

    @classmethod
    def from_laurent(cls, a):
        return cls(a, LaurentScalar.const(a.nv, 1), _normalized=True)

    @property
    def nv(self):
        return self.num.nv

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.den.is_one() and self.num.is_one()

    def is_laurent(self):
        return self.den.is_one()

    def as_laurent(self):
        if self.den.is_one():
            return self.num
        return self.num.exact_divide(self.den)

    def _coerce(self, other):
        if isinstance(other, RatScalar):
            return other
        if isinstance(other, int):
            return RatScalar.from_laurent(LaurentScalar.const(self.nv, other))
        if isinstance(other, LaurentScalar):
            return RatScalar.from_laurent(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        if self.den == o.den:
            return RatScalar(self.num + o.num, self.den)
        if self.den.is_one():
            # gcd(a*d + c, d) = gcd(c, d) = 1, so nothing to cancel
            return RatScalar(self.num * o.den + o.num, o.den, _coprime=True)
        if o.den.is_one():
            return RatScalar(self.num + o.num * self.den, self.den,
                             _coprime=True)
        g = _poly_gcd(self.den, o.den)
        if g.is_one():
            return RatScalar(self.num * o.den + o.num * self.den,
                             self.den * o.den, _coprime=True)
        # b = g*b', d = g*d' with b', d' coprime: the sum over the lcm g*b'*d'
        # can only share factors of g with its denominator
        db = _div_cached(self.den, g)
        dd = _div_cached(o.den, g)
        num = self.num * dd + o.num * db
        if num.is_zero():
            return RatScalar.from_laurent(LaurentScalar(self.nv))
        den = self.den * dd
        h = _poly_gcd(num, g)
        if not h.is_one():
            num = num.exact_divide(h)
            den = _div_cached(den, h)
        return RatScalar(num, den, _coprime=True)

    __radd__ = __add__

    def __neg__(self):
        return RatScalar(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    @staticmethod
    def _cross_cancelled(a, b, c, d):
        """a/b * c/d with both inputs reduced; cancels across before
        multiplying so the product needs no gcd of its own."""
        if a.is_zero() or c.is_zero():
            return RatScalar.from_laurent(LaurentScalar(a.nv))
        g = _poly_gcd(a, d)
        if not g.is_one():
            a = _div_cached(a, g)
            d = _div_cached(d, g)
        g = _poly_gcd(c, b)
        if not g.is_one():
            c = _div_cached(c, g)
            b = _div_cached(b, g)
        return RatScalar(a * c, b * d, _coprime=True)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return other * self
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._cross_cancelled(self.num, self.den, o.num, o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero value")
        return self._cross_cancelled(self.num, self.den, o.den, o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatScalar(self.den, self.num, _coprime=True)

    def __pow__(self, p):
        if p < 0:
            return self.inverse() ** (-p)
        out = RatScalar.from_laurent(LaurentScalar.const(self.nv, 1))
        for _ in range(p):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.num is o.num and self.den is o.den:
            return True
        if self.den == o.den:
            return self.num == o.num
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        # hash-compatible with == only for normalized-equal values; fractions
        # that merely cross-multiply equal may differ, so containers keyed by
        # RatScalar are only used with values produced by identical pipelines
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def permute_slots(self, image):
        return RatScalar(self.num.permute_slots(image),
                         self.den.permute_slots(image))

    def reverse_invert_slots(self, lo, hi):
        return RatScalar(self.num.reverse_invert_slots(lo, hi),
                         self.den.reverse_invert_slots(lo, hi))

    def render(self, names=None):
        if self.den.is_one():
            return self.num.render(names)
        return "(%s)/(%s)" % (self.num.render(names), self.den.render(names))

    def __repr__(self):
        return "RatScalar(%s)" % self.render()

    def to_json(self, var_names=None):
        return {"num": self.num.to_json(var_names),
                "den": self.den.to_json(var_names)}

    @classmethod
    def from_json(cls, doc):
        return cls(LaurentScalar.from_json(doc["num"]),
                   LaurentScalar.from_json(doc["den"]))


def substitute_parameters(value, sigma, n, offset=0):
    """Apply a parameter substitution to a LaurentScalar or RatScalar.

    sigma is either a permutation of 1..n given as a tuple/list of images
    (sigma[i-1] = image of e_i), or the string "reverse_invert" for the map
    e_i -> e_{n+1-i}^{-1}.  ``offset`` locates e_1 within the slot layout.
    """
    if sigma == "reverse_invert":
        return value.reverse_invert_slots(offset, offset + n)
    image = list(range(value.nv))
    for i in range(1, n + 1):
        image[offset + i - 1] = offset + sigma[i - 1] - 1
    return value.permute_slots(image)


class QSeries:
    """Power series in q truncated at a fixed order, RatScalar coefficients."""

    __slots__ = ("order", "coeffs", "nv")

    def __init__(self, order, coeffs, nv):
        self.order = order
        self.nv = nv
        clean = {}
        for d, c in coeffs.items():
            if d < 0:
                raise ValueError("negative q-power in a truncated series")
            if d <= order and not c.is_zero():
                clean[d] = c
        self.coeffs = clean

    @classmethod
    def const(cls, order, value, nv):
        if isinstance(value, int):
            value = RatScalar.from_laurent(LaurentScalar.const(nv, value))
        elif isinstance(value, LaurentScalar):
            value = RatScalar.from_laurent(value)
        return cls(order, {0: value}, nv)

    @classmethod
    def q_power(cls, order, d, nv):
        one = RatScalar.from_laurent(LaurentScalar.const(nv, 1))
        return cls(order, {d: one}, nv)

    def coefficient(self, d):
        c = self.coeffs.get(d)
        if c is None:
            return RatScalar.from_laurent(LaurentScalar.const(self.nv, 0))
        return c

    def is_zero(self):
        return not self.coeffs

    def constant_term(self):
        return self.coefficient(0)

    def _coerce(self, other):
        if isinstance(other, QSeries):
            if other.nv != self.nv:
                raise DimensionError("mixed variable counts in series")
            return other
        if isinstance(other, (int, LaurentScalar, RatScalar)):
            return QSeries.const(self.order, other, self.nv)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        order = min(self.order, o.order)
        out = {}
        for d in set(self.coeffs) | set(o.coeffs):
            if d <= order:
                out[d] = self.coefficient(d) + o.coefficient(d)
        return QSeries(order, out, self.nv)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.order, {d: -c for d, c in self.coeffs.items()},
                       self.nv)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        order = min(self.order, o.order)
        out = {}
        for da, ca in self.coeffs.items():
            for db, cb in o.coeffs.items():
                d = da + db
                if d <= order:
                    prod = ca * cb
                    if d in out:
                        out[d] = out[d] + prod
                    else:
                        out[d] = prod
        return QSeries(order, out, self.nv)

    __rmul__ = __mul__

    def shift(self, d):
        """Multiply by q^d (d >= 0), keeping the truncation order."""
        return QSeries(self.order,
                       {k + d: c for k, c in self.coeffs.items()}, self.nv)

    def truncate(self, order):
        return QSeries(order, {d: c for d, c in self.coeffs.items()
                               if d <= order}, self.nv)

    def invert(self):
        c0 = self.constant_term()
        if c0.is_zero():
            raise NonUnitError("series with zero constant term")
        inv0 = c0.inverse()
        out = {0: inv0}
        for d in range(1, self.order + 1):
            acc = None
            for j in range(1, d + 1):
                cj = self.coeffs.get(j)
                bj = out.get(d - j)
                if cj is None or bj is None:
                    continue
                term = cj * bj
                acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero():
                out[d] = -(inv0 * acc)
        return QSeries(self.order, out, self.nv)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.invert()

    def __pow__(self, p):
        if p < 0:
            return self.invert() ** (-p)
        out = QSeries.const(self.order, 1, self.nv)
        for _ in range(p):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        order = min(self.order, o.order)
        for d in range(order + 1):
            if self.coefficient(d) != o.coefficient(d):
                return False
        return True

    def __hash__(self):
        raise TypeError("QSeries is not hashable")

    def map_coefficients(self, fn):
        return QSeries(self.order,
                       {d: fn(c) for d, c in self.coeffs.items()}, self.nv)

    def permute_slots(self, image):
        return self.map_coefficients(lambda c: c.permute_slots(image))

    def reverse_invert_slots(self, lo, hi):
        return self.map_coefficients(lambda c: c.reverse_invert_slots(lo, hi))

    def render(self, names=None):
        if not self.coeffs:
            return "O(q^%d)" % (self.order + 1)
        parts = []
        for d in sorted(self.coeffs):
            c = self.coeffs[d].render(names)
            if d == 0:
                parts.append(c)
            else:
                parts.append("(%s)*q^%d" % (c, d))
        return " + ".join(parts) + " + O(q^%d)" % (self.order + 1)

    def __repr__(self):
        return "QSeries(%s)" % self.render()

    def to_json(self, var_names=None):
        return {"order": self.order,
                "coeffs": [self.coefficient(d).to_json(var_names)
                           for d in range(self.order + 1)]}

    @classmethod
    def from_json(cls, doc):
        coeffs = {d: RatScalar.from_json(c)
                  for d, c in enumerate(doc["coeffs"])}
        nv = coeffs[0].nv if coeffs else 0
        return cls(doc["order"], coeffs, nv)


def qseries_invert(a):
    return a.invert()


class QKValue:
    """Exact value P(q)/(1-q)^e with e in {0,1}, RatScalar coefficients in P.

    Canonical: when e = 1 the numerator is not divisible by (1-q).
    """

    __slots__ = ("num_coeffs", "den_pow", "nv")

    def __init__(self, num_coeffs, den_pow, nv):
        clean = {d: c for d, c in num_coeffs.items() if not c.is_zero()}
        while den_pow > 0:
            reduced = self._try_reduce(clean)
            if reduced is None:
                break
            clean = reduced
            den_pow -= 1
        self.num_coeffs = clean
        self.den_pow = den_pow
        self.nv = nv

    @staticmethod
    def _try_reduce(coeffs):
        """Quotient by (1-q) when exact (P(1) = 0), else None."""
        if not coeffs:
            return {}
        nv = next(iter(coeffs.values())).nv
        acc = _zero_rat(nv)
        out = {}
        for d in range(0, max(coeffs) + 1):
            c = coeffs.get(d)
            if c is not None:
                acc = acc + c
            if not acc.is_zero():
                out[d] = acc
        if not acc.is_zero():
            return None
        return out

    @classmethod
    def from_parts(cls, finite, tail, tail_degree, nv):
        """Sum_{d<D} finite[d] q^d plus tail * q^D/(1-q), D = tail_degree."""
        expanded = {}
        for d, c in finite.items():
            expanded[d] = expanded.get(d, _zero_rat(nv)) + c
            expanded[d + 1] = expanded.get(d + 1, _zero_rat(nv)) - c
        expanded[tail_degree] = expanded.get(tail_degree, _zero_rat(nv)) + tail
        return cls(expanded, 1, nv)

    def q_coefficient(self, d):
        """Coefficient of q^d in the series expansion."""
        if self.den_pow == 0:
            return self.num_coeffs.get(d, _zero_rat(self.nv))
        acc = _zero_rat(self.nv)
        for k, c in self.num_coeffs.items():
            if k <= d:
                acc = acc + c
        return acc

    def to_qseries(self, order):
        out = {d: self.q_coefficient(d) for d in range(order + 1)}
        return QSeries(order, out, self.nv)

    def __add__(self, other):
        if isinstance(other, (int, LaurentScalar, RatScalar)):
            other = QKValue({0: _rat(self.nv, other)}, 0, self.nv)
        if not isinstance(other, QKValue):
            return NotImplemented
        e = max(self.den_pow, other.den_pow)
        out = {}
        for src in (self._scaled_num(e), other._scaled_num(e)):
            for d, c in src.items():
                out[d] = out.get(d, _zero_rat(self.nv)) + c
        return QKValue(out, e, self.nv)

    __radd__ = __add__

    def _scaled_num(self, e):
        out = dict(self.num_coeffs)
        for _ in range(e - self.den_pow):
            nxt = {}
            for d, c in out.items():
                nxt[d] = nxt.get(d, _zero_rat(self.nv)) + c
                nxt[d + 1] = nxt.get(d + 1, _zero_rat(self.nv)) - c
            out = nxt
        return out

    def __neg__(self):
        return QKValue({d: -c for d, c in self.num_coeffs.items()},
                       self.den_pow, self.nv)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, LaurentScalar, RatScalar)):
            c = _rat(self.nv, other)
            return QKValue({d: v * c for d, v in self.num_coeffs.items()},
                           self.den_pow, self.nv)
        if isinstance(other, QKValue):
            out = {}
            for da, ca in self.num_coeffs.items():
                for db, cb in other.num_coeffs.items():
                    d = da + db
                    p = ca * cb
                    out[d] = out.get(d, _zero_rat(self.nv)) + p
            return QKValue(out, self.den_pow + other.den_pow, self.nv)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, QKValue):
            if self.den_pow == other.den_pow:
                a, b = self.num_coeffs, other.num_coeffs
            else:
                e = max(self.den_pow, other.den_pow)
                a, b = self._scaled_num(e), other._scaled_num(e)
            keys = set(a) | set(b)
            z = _zero_rat(self.nv)
            return all(a.get(d, z) == b.get(d, z) for d in keys)
        if isinstance(other, (int, LaurentScalar, RatScalar)):
            return self == QKValue({0: _rat(self.nv, other)}, 0, self.nv)
        return NotImplemented

    def __hash__(self):
        raise TypeError("QKValue is not hashable")

    def is_zero(self):
        return not self.num_coeffs

    def is_single_monomial_over_1mq(self):
        """True when the value is exactly c*q^d/(1-q); returns (d, c) or None."""
        if self.den_pow != 1 or len(self.num_coeffs) != 1:
            return None
        (d, c), = self.num_coeffs.items()
        return d, c

    def render(self, names=None):
        if not self.num_coeffs:
            return "0"
        parts = []
        for d in sorted(self.num_coeffs):
            c = self.num_coeffs[d].render(names)
            parts.append("(%s)" % c if d == 0 else "(%s)*q^%d" % (c, d))
        body = " + ".join(parts)
        return body if self.den_pow == 0 else "[%s]/(1-q)" % body

    def __repr__(self):
        return "QKValue(%s)" % self.render()

    def to_json(self, var_names=None):
        top = max(self.num_coeffs) if self.num_coeffs else 0
        num = [self.num_coeffs.get(d, _zero_rat(self.nv)).to_json(var_names)
               for d in range(top + 1)]
        return {"num": num, "den_pow": self.den_pow}

    @classmethod
    def from_json(cls, doc):
        coeffs = {d: RatScalar.from_json(c) for d, c in enumerate(doc["num"])}
        nv = coeffs[0].nv if coeffs else 0
        return cls(coeffs, doc["den_pow"], nv)


def _zero_rat(nv):
    return RatScalar.from_laurent(LaurentScalar.const(nv, 0))


def _rat(nv, value):
    if isinstance(value, RatScalar):
        return value
    if isinstance(value, LaurentScalar):
        return RatScalar.from_laurent(value)
    return RatScalar.from_laurent(LaurentScalar.const(nv, value))


class CoeffRing:
    """The shared slot layout Z[q^{±1}, y, e_1^{±1}..e_n^{±1}] for rank n.

    Slot 0 is q, slot 1 is y, slot 2+i is e_{i+1}.  Every module-element
    coefficient in the package lives here; pure equivariant scalars simply
    leave the q and y slots at exponent zero.
    """

    __slots__ = ("n", "nv")

    Q_SLOT = 0
    Y_SLOT = 1
    EPS_OFFSET = 2

    def __init__(self, n):
        self.n = n
        self.nv = n + 2

    def zero(self):
        return LaurentScalar(self.nv)

    def one(self):
        return LaurentScalar.const(self.nv, 1)

    def const(self, c):
        return LaurentScalar.const(self.nv, c)

    def q(self, power=1):
        return LaurentScalar.monomial(self.nv, self.Q_SLOT, power)

    def y(self, power=1):
        return LaurentScalar.monomial(self.nv, self.Y_SLOT, power)

    def eps(self, i, power=1):
        return LaurentScalar.monomial(self.nv, self.EPS_OFFSET + i - 1, power)

    def inv_eps(self, i):
        return self.eps(i, -1)

    def alpha(self, i):
        """The simple-root character e_i/e_{i+1}."""
        exp = [0] * self.nv
        exp[self.EPS_OFFSET + i - 1] = 1
        exp[self.EPS_OFFSET + i] = -1
        return LaurentScalar(self.nv, {tuple(exp): 1})

    def monomial(self, qe=0, ye=0, eps_exps=()):
        exp = [0] * self.nv
        exp[self.Q_SLOT] = qe
        exp[self.Y_SLOT] = ye
        for i, e in eps_exps:
            exp[self.EPS_OFFSET + i - 1] += e
        return LaurentScalar(self.nv, {tuple(exp): 1})

    def weyl_permute(self, value, w):
        """Substitute e_i -> e_{w(i)}; w is a tuple of images of 1..n."""
        return substitute_parameters(value, w, self.n, self.EPS_OFFSET)

    def gamma_twist(self, value):
        """Substitute e_i -> e_{n+1-i}^{-1}, fixing q and y."""
        return value.reverse_invert_slots(self.EPS_OFFSET,
                                          self.EPS_OFFSET + self.n)

    def swap_eps(self, value, i, j):
        w = list(range(1, self.n + 1))
        w[i - 1], w[j - 1] = j, i
        return self.weyl_permute(value, tuple(w))

    def var_names(self):
        return ["q", "y"] + ["e%d" % (i + 1) for i in range(self.n)]

    def eps_only_names(self):
        return self.var_names()

    def render(self, value):
        return value.render(self.var_names())

    def json_dump(self, value):
        return json.dumps(value.to_json(self.var_names()))
