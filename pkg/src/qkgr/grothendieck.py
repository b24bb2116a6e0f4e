"""Double Grothendieck polynomials and elementary-symmetric expansions.

Polynomials live in 2n slots: x_1..x_n at 0..n-1, then t_1..t_n.  The top
class is the product of x_i (+) t_j over i+j <= n, with a (+) b meaning
1 - (1-a)(1-b), and lower classes follow by isobaric divided differences
applied along ascents.  All coefficients stay integers; the division in
each difference is exact and verified.
"""

from .scalars import DivisibilityError, LaurentScalar, RatScalar
from .shapes import (
    apply_simple_right, long_element, perm_from_partition,
)


class SymmetryError(ValueError):
    pass


def x_slot(n, i):
    return i - 1


def t_slot(n, j):
    return n + j - 1


def x_var(n, i):
    return LaurentScalar.monomial(2 * n, x_slot(n, i))


def t_var(n, j):
    return LaurentScalar.monomial(2 * n, t_slot(n, j))


def circle_sum(a, b):
    """a (+) b = a + b - a*b = 1 - (1-a)(1-b)."""
    return a + b - a * b


def swap_slots(f, s, t):
    image = list(range(f.nv))
    image[s], image[t] = t, s
    return f.permute_slots(image)


def divided_difference(f, n, i):
    """(f - s_i f)/(x_i - x_{i+1}), the s_i acting on x slots."""
    g = f - swap_slots(f, x_slot(n, i), x_slot(n, i + 1))
    den = x_var(n, i) - x_var(n, i + 1)
    if g.is_zero():
        return g
    return g.exact_divide(den)


def isobaric_difference(f, n, i):
    """pi_i f = d_i((1 - x_{i+1}) f)."""
    return divided_difference((1 - x_var(n, i + 1)) * f, n, i)


_memo = {}


def groth_top(n):
    key = (n, long_element(n))
    if key not in _memo:
        f = LaurentScalar.const(2 * n, 1)
        for i in range(1, n):
            for j in range(1, n + 1 - i):
                f = f * circle_sum(x_var(n, i), t_var(n, j))
        _memo[key] = f
    return _memo[key]


def groth_perm(n, w):
    """Double Grothendieck polynomial of a permutation in S_n."""
    w = tuple(w)
    key = (n, w)
    if key in _memo:
        return _memo[key]
    if w == long_element(n):
        return groth_top(n)
    # find an ascent; w s_i is longer, closer to the top of the order
    for i in range(1, n):
        if w[i - 1] < w[i]:
            above = groth_perm(n, apply_simple_right(w, i))
            f = isobaric_difference(above, n, i)
            _memo[key] = f
            return f
    raise AssertionError("unreachable: only the long element lacks ascents")


def groth_double(lam):
    """Polynomial representative of the Schubert class of lam in its box.

    Only x_1..x_k appear (checked); the t variables run over 1..n.
    """
    w = perm_from_partition(lam).w
    f = groth_perm(lam.n, w)
    n = lam.n
    for exp in f.terms:
        if any(exp[x_slot(n, i)] for i in range(lam.k + 1, n + 1)):
            raise AssertionError("class polynomial touches x beyond k")
    return f


def groth_column(r, xs, ts):
    """Closed column formula for the class of the single column 1^r.

    xs, ts are values in a common fraction field; the alternating sum has
    denominators that must cancel, leaving a polynomial value.
    """
    N = len(xs)
    if not (1 <= r <= N):
        raise ValueError("need 1 <= r <= len(xs)")
    xs = [v if isinstance(v, RatScalar) else RatScalar.from_laurent(v)
          for v in xs]
    ts = [v if isinstance(v, RatScalar) else RatScalar.from_laurent(v)
          for v in ts]
    total = None
    for j in range(1, N + 2 - r):
        num = None
        for i in range(1, N + 1):
            f = xs[i - 1] + ts[j - 1] - xs[i - 1] * ts[j - 1]
            num = f if num is None else num * f
        den = None
        for i in range(1, N + 2 - r):
            if i == j:
                continue
            f = (ts[j - 1] - ts[i - 1]) / (1 - ts[i - 1])
            den = f if den is None else den * f
        term = num if den is None else num / den
        total = term if total is None else total + term
    if not total.is_laurent():
        raise DivisibilityError("column formula denominators did not cancel")
    return total.num


def elementary_poly(i, slots, nv):
    """e_i of the variables at the given slots, in an nv-slot layout."""
    from itertools import combinations
    out = {}
    for combo in combinations(slots, i):
        exp = [0] * nv
        for s in combo:
            exp[s] = 1
        out[tuple(exp)] = 1
    if i == 0:
        return LaurentScalar.const(nv, 1)
    return LaurentScalar(nv, out)


def expand_elementary(e_exps, slots, nv):
    """Product of e_i^{m_i} for the exponent tuple (m_1, .., m_len(slots))."""
    f = LaurentScalar.const(nv, 1)
    for i, m in enumerate(e_exps, start=1):
        for _ in range(m):
            f = f * elementary_poly(i, slots, nv)
    return f


def elementary_expansion(f, slots):
    """Rewrite f as a polynomial in e_1..e_m of the variables at ``slots``.

    Returns a dict mapping exponent tuples (m_1..m_m) to coefficients
    (Laurent in the remaining slots, the expansion slots zeroed).  Raises
    SymmetryError when f is not symmetric in those variables.
    """
    slots = list(slots)
    m = len(slots)
    nv = f.nv
    rest = [s for s in range(nv) if s not in slots]
    remainder = f
    out = {}
    while not remainder.is_zero():
        lead = max(remainder.terms, key=lambda e: tuple(e[s] for s in slots))
        a = tuple(lead[s] for s in slots)
        if any(e < 0 for e in a):
            raise SymmetryError("negative exponent in expansion variables")
        if any(a[i] < a[i + 1] for i in range(m - 1)):
            raise SymmetryError("not symmetric in the expansion variables")
        coef_terms = {}
        for exp, c in remainder.terms.items():
            if tuple(exp[s] for s in slots) == a:
                e = list(exp)
                for s in slots:
                    e[s] = 0
                coef_terms[tuple(e)] = c
        coef = LaurentScalar(nv, coef_terms)
        e_exp = tuple(a[i] - a[i + 1] for i in range(m - 1)) + (a[m - 1],)
        out[e_exp] = coef
        remainder = remainder - coef * expand_elementary(e_exp, slots, nv)
    return out


class SymPoly:
    """A polynomial with a marked block of symmetric variables."""

    __slots__ = ("poly", "slots")

    def __init__(self, poly, slots):
        self.poly = poly
        self.slots = list(slots)

    def is_symmetric(self):
        try:
            self.elementary()
            return True
        except SymmetryError:
            return False

    def elementary(self):
        return elementary_expansion(self.poly, self.slots)

    def __eq__(self, other):
        return (isinstance(other, SymPoly) and self.poly == other.poly
                and self.slots == other.slots)


def evaluate_poly(f, values, one, zero):
    """Substitute values[slot] (target-ring elements) into every slot of f.

    Terms are grouped slot-by-slot so shared sub-products are reused;
    exponents must be nonnegative wherever the value is not invertible.
    """
    caches = [dict() for _ in range(f.nv)]

    def power(slot, e):
        d = caches[slot]
        if e not in d:
            d[e] = values[slot] ** e
        return d[e]

    def rec(terms, slot):
        if slot == f.nv:
            s = 0
            for _, c in terms:
                s += c
            return one * s
        groups = {}
        for exp, c in terms:
            groups.setdefault(exp[slot], []).append((exp, c))
        acc = zero
        for e, grp in groups.items():
            sub = rec(grp, slot + 1)
            if e:
                sub = sub * power(slot, e)
            acc = acc + sub
        return acc

    return rec(list(f.terms.items()), 0)
