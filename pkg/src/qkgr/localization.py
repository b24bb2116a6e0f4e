"""Fixed-point localization: restrictions of Schubert classes, equivariant
Euler characteristics, classical products, and the quantum pairing.

The restriction of a Schubert class to a fixed point is, by definition,
its double Grothendieck polynomial evaluated at x_i = 1 - e_{a_i} where
(a_1 < .. < a_k) indexes the fixed point, and t_j = 1 - 1/e_j.  The matrix
of restrictions is triangular for diagram containment, which both proves
classes are determined by their restrictions and drives the solver here.
"""

from .grothendieck import evaluate_poly, groth_double, t_slot, x_slot
from .scalars import CoeffRing, LaurentScalar, QKValue, RatScalar
from .shapes import BoxPartition, all_partitions
from .vertex import ModuleElement
from .weyl import apply_w0

_restriction_cache = {}


def restrict(lam, mu):
    """Restriction of the class of lam to the fixed point mu (same box)."""
    key = (lam.k, lam.n, lam.parts, mu.parts)
    cache = _restriction_cache
    if key not in cache:
        n = lam.n
        ring = CoeffRing(n)
        if not mu.contains(lam):
            cache[key] = ring.zero()
        else:
            f = groth_double(lam)
            idx = mu.epsilon_index()
            values = [ring.zero()] * (2 * n)
            for i in range(1, lam.k + 1):
                values[x_slot(n, i)] = 1 - ring.eps(idx[i - 1])
            for j in range(1, n + 1):
                values[t_slot(n, j)] = 1 - ring.eps(j) ** -1
            cache[key] = evaluate_poly(f, values, ring.one(), ring.zero())
    return cache[key]


def restriction_vector(v):
    """Restrictions of a module element at every fixed point of its box."""
    out = {}
    for mu in all_partitions(v.k, v.n):
        acc = None
        for lam, c in v.coeffs.items():
            if not mu.contains(lam):
                continue
            term = c * restrict(lam, mu)
            acc = term if acc is None else acc + term
        if acc is not None:
            out[mu] = acc
    return out


def sub_weights(mu):
    """Characters of the tautological bundle at the fixed point."""
    return [a for a in mu.epsilon_index()]


def quotient_weights(mu):
    """Characters of the quotient bundle at the fixed point."""
    inside = set(mu.epsilon_index())
    return [b for b in range(1, mu.n + 1) if b not in inside]


def euler_weight(mu):
    """Product of (1 - e_a/e_b) over a indexing mu, b outside."""
    ring = CoeffRing(mu.n)
    out = ring.one()
    for a in sub_weights(mu):
        for b in quotient_weights(mu):
            out = out * (1 - ring.eps(a) * ring.eps(b) ** -1)
    return out


def _euler_factor_pairs(k, n):
    """All ordered pairs (a, b), a != b, of the full denominator."""
    return [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if a != b]


def euler_char_from_values(values, k, n):
    """Sum of value(mu)/EulerWeight(mu) over the fixed points.

    Laurent inputs give a Laurent output via a common denominator and
    factorwise exact division; fraction inputs go through RatScalar.
    """
    ring = CoeffRing(n)
    points = all_partitions(k, n)
    exact = all(isinstance(values.get(mu, ring.zero()), LaurentScalar)
                for mu in points)
    if exact:
        total = ring.zero()
        for mu in points:
            val = values.get(mu)
            if val is None or val.is_zero():
                continue
            inside = set(mu.epsilon_index())
            term = val
            for a, b in _euler_factor_pairs(k, n):
                if a in inside and b not in inside:
                    continue
                term = term * (1 - ring.eps(a) * ring.eps(b) ** -1)
            total = total + term
        for a, b in _euler_factor_pairs(k, n):
            total = total.exact_divide(1 - ring.eps(a) * ring.eps(b) ** -1)
        return total
    total = None
    for mu in points:
        val = values.get(mu)
        if val is None:
            continue
        if isinstance(val, LaurentScalar):
            val = RatScalar.from_laurent(val)
        term = val * RatScalar(LaurentScalar.const(ring.nv, 1),
                               euler_weight(mu))
        total = term if total is None else total + term
    return total if total is not None else \
        RatScalar.from_laurent(ring.zero())


def euler_char(v):
    return euler_char_from_values(restriction_vector(v), v.k, v.n)


def class_from_restrictions(k, n, values):
    """The unique basis combination with the given fixed-point values.

    ``values`` maps partitions to Laurent (or RatScalar) scalars; the
    triangular system is solved in graded order with exact divisions.
    """
    ring = CoeffRing(n)
    coeffs = {}
    for mu in all_partitions(k, n):
        residual = values.get(mu, ring.zero())
        for lam, c in coeffs.items():
            if mu.contains(lam):
                residual = residual - c * restrict(lam, mu)
        if isinstance(residual, LaurentScalar) and residual.is_zero():
            continue
        diag = restrict(mu, mu)
        if isinstance(residual, LaurentScalar):
            coeffs[mu] = residual.exact_divide(diag)
        else:
            coeffs[mu] = residual * RatScalar(
                LaurentScalar.const(ring.nv, 1), diag)
    return ModuleElement(k, n, coeffs)


def classical_product(a, b):
    """Product in the classical equivariant ring, through restrictions."""
    if (a.k, a.n) != (b.k, b.n):
        raise ValueError("classes live on different spaces")
    ra = restriction_vector(a)
    rb = restriction_vector(b)
    values = {}
    for mu, x in ra.items():
        if mu in rb:
            values[mu] = x * rb[mu]
    return class_from_restrictions(a.k, a.n, values)


def opposite_class(mu):
    """Class of the opposite Schubert variety of shape mu: the longest
    Weyl element applied to the Schubert class of the same shape.

    Characterizing anchors: pairing with a Schubert class gives a single
    power of q over (1 - q), and the point case of Gr(1,2) pairs to
    q/(1-q) against the Schubert point.
    """
    return apply_w0(ModuleElement.basis(mu.k, mu.n, mu))


def curve_shift_class(v, d, mode="both"):
    """Linear extension of the degree-d diagram shift on the basis."""
    out = ModuleElement.zero(v.k, v.n)
    for lam, c in v.coeffs.items():
        out = out + ModuleElement(v.k, v.n, {lam.shift(d, mode): c})
    return out


def kgw_2point(a, b, d):
    """Two-point invariant of degree d: the Euler characteristic of the
    degree-d neighborhood of a against b."""
    shifted = curve_shift_class(a, d)
    ra = restriction_vector(shifted)
    rb = restriction_vector(b)
    values = {mu: ra[mu] * rb[mu] for mu in ra if mu in rb}
    return euler_char_from_values(values, a.k, a.n)


def _q_split(val):
    """Decompose a scalar by its q-power: list of (e, q-free RatScalar)."""
    if isinstance(val, LaurentScalar):
        val = RatScalar.from_laurent(val)
    den = val.den
    if not den.is_zero() and (den.degree_in(CoeffRing.Q_SLOT) != 0
                              or den.valuation_in(CoeffRing.Q_SLOT) != 0):
        raise AssertionError("invariant denominator involves q")
    num = val.num
    if num.is_zero():
        return []
    out = []
    lo = num.valuation_in(CoeffRing.Q_SLOT)
    hi = num.degree_in(CoeffRing.Q_SLOT)
    if lo < 0:
        raise AssertionError("invariant has a negative q-power")
    for e in range(lo, hi + 1):
        piece = num.coefficient_of(CoeffRing.Q_SLOT, e)
        if not piece.is_zero():
            out.append((e, RatScalar(piece, den)))
    return out


def qk_pairing(a, b):
    """The quantum pairing as an exact value over (1 - q).

    Degrees grow until the invariants provably stabilize (one past the
    minimum of k and n-k, with the repeat checked), giving a finite part
    plus a geometric tail.  Any q carried by the input coefficients is
    folded into the degree grading of the result.
    """
    k, n = a.k, a.n
    nv = CoeffRing(n).nv
    cap = min(k, n - k)
    invariants = [kgw_2point(a, b, d) for d in range(cap + 2)]
    if invariants[cap + 1] != invariants[cap]:
        raise AssertionError("two-point invariants failed to stabilize")
    total = QKValue({}, 0, nv)
    for d in range(cap):
        for e, c in _q_split(invariants[d]):
            total = total + QKValue({d + e: c}, 0, nv)
    for e, c in _q_split(invariants[cap]):
        total = total + QKValue.from_parts({}, c, cap + e, nv)
    return total


def pairing_matrix(k, n):
    """Cached quantum pairings of all basis pairs."""
    key = (k, n)
    if key not in _pairing_cache:
        points = all_partitions(k, n)
        mat = {}
        for lam in points:
            a = ModuleElement.basis(k, n, lam)
            for mu in points:
                mat[(lam, mu)] = qk_pairing(
                    a, ModuleElement.basis(k, n, mu))
        _pairing_cache[key] = mat
    return _pairing_cache[key]


_pairing_cache = {}


def pair_with_matrix(a, b):
    """Bilinear quantum pairing through the cached basis matrix; accepts
    any coefficient type that multiplies with RatScalar."""
    mat = pairing_matrix(a.k, a.n)
    total = None
    for lam, ca in a.coeffs.items():
        for mu, cb in b.coeffs.items():
            term = (ca * cb) * mat[(lam, mu)]
            total = term if total is None else total + term
    return total


def kgw_3point(a, b, c, d):
    """Three-point invariant of degree d, extracted from the pairing of
    the quantum product against the third argument."""
    from .products import qk_product
    value = qk_pairing(qk_product(a, b), c)
    return value.q_coefficient(d)


_BUNDLE_WEIGHTS = {
    "S": (sub_weights, 1),
    "Sdual": (sub_weights, -1),
    "Q": (quotient_weights, 1),
    "Qdual": (quotient_weights, -1),
}


def lambda_y_values(k, n, bundle):
    """Fixed-point values prod (1 + y*w) of the lambda_y class of a
    tautological bundle: S, Q, or their duals."""
    pick, sign = _BUNDLE_WEIGHTS[bundle]
    ring = CoeffRing(n)
    values = {}
    for mu in all_partitions(k, n):
        v = ring.one()
        for w in pick(mu):
            v = v * (1 + ring.y() * ring.eps(w, sign))
        values[mu] = v
    return values


def lambda_y_class(k, n, bundle):
    """Schubert expansion of the lambda_y class of a tautological bundle."""
    return class_from_restrictions(k, n, lambda_y_values(k, n, bundle))


def wedge_class(k, n, bundle, j):
    """Schubert expansion of the j-th exterior power of a tautological
    bundle, cut out of the lambda_y class."""
    values = {mu: v.coefficient_of(CoeffRing.Y_SLOT, j)
              for mu, v in lambda_y_values(k, n, bundle).items()}
    return class_from_restrictions(k, n, values)


def gram_dual_basis(k, n):
    """Classical dual basis: elements pairing to delta against the
    Schubert basis under the classical Euler pairing."""
    key = (k, n)
    if key not in _gram_cache:
        _gram_cache[key] = _solve_gram(all_partitions(k, n), k, n)
    return _gram_cache[key]


def _solve_gram(points, k, n):
    """Invert the Gram matrix of classical pairings chi(O_lam O_mu)."""
    ring = CoeffRing(n)
    size = len(points)
    gram = []
    for lam in points:
        row = []
        a = ModuleElement.basis(k, n, lam)
        for mu in points:
            val = euler_char(classical_product(
                a, ModuleElement.basis(k, n, mu)))
            row.append(RatScalar.from_laurent(val))
        gram.append(row)
    # gaussian elimination over the fraction field, augmented by identity
    one = RatScalar.from_laurent(ring.one())
    zero = RatScalar.from_laurent(ring.zero())
    aug = [row + [one if i == j else zero for j in range(size)]
           for i, row in enumerate(gram)]
    for col in range(size):
        piv = next(r for r in range(col, size)
                   if not aug[r][col].is_zero())
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(size):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    duals = {}
    for i, nu in enumerate(points):
        coeffs = {}
        for j, lam in enumerate(points):
            c = aug[i][size + j]
            if not c.is_zero():
                coeffs[lam] = c
        duals[nu] = ModuleElement(k, n, coeffs)
    return duals


_gram_cache = {}
