"""Power-series Bethe roots and everything built on top of them: on-shell
vectors and their transfer eigenvalues, the dual construction through the
level-rank flip, quantum Euler classes, the quantum localization map, and
the quantum character.

All series are truncated at a fixed q-order.  The q variable never enters
the series coefficients here; multiplying by q is always an external shift
of the grading, so truncation stays sound.
"""

import json
import os
import tempfile

from .grothendieck import evaluate_poly, groth_double, t_slot, x_slot
from .localization import (
    class_from_restrictions, euler_char, euler_weight, pairing_matrix,
)
from .scalars import CoeffRing, LaurentScalar, QSeries, RatScalar
from .shapes import BoxPartition, all_partitions
from .vertex import ModuleElement, apply_generator, dual_generator, gamma


class DegeneracyError(ArithmeticError):
    """The linearized Bethe system is singular at q = 0."""


class BetheRoot:
    """A tuple of root series for one partition, exact to the stated order."""

    __slots__ = ("lam", "order", "roots")

    def __init__(self, lam, order, roots):
        self.lam = lam
        self.order = order
        self.roots = list(roots)

    def __repr__(self):
        return "BetheRoot(%r, order=%d)" % (self.lam, self.order)

    def to_json(self):
        return {"partition": list(self.lam.parts), "order": self.order,
                "roots": [s.to_json() for s in self.roots]}

    @classmethod
    def from_json(cls, k, n, doc):
        lam = BoxPartition(k, n, tuple(doc["partition"]))
        roots = [QSeries.from_json(s) for s in doc["roots"]]
        return cls(lam, doc["order"], roots)


class BetheVector:
    """An on-shell vector: its label, truncation order, and expansion."""

    __slots__ = ("lam", "order", "element")

    def __init__(self, lam, order, element):
        self.lam = lam
        self.order = order
        self.element = element

    def __repr__(self):
        return "BetheVector(%r, order=%d)" % (self.lam, self.order)


# -- the equations and their Newton solver ----------------------------------

def bae_system(k, n, order):
    """The cleared equations for Gr(k,n) as a callable on k series.

    Equation i is prod_j(1 - x_i/e_j) * prod_{j!=i} x_j + (-1)^k q x_i^{k-1};
    the callable returns (residuals, jacobian rows).
    """
    ring = CoeffRing(n)
    factors = [ring.eps(j, -1) for j in range(1, n + 1)]
    return _cleared_system(k, factors, order, ring.nv)


def dual_bae_system(kd, n, order):
    """Same shape with factors (1 - x_i e_j) and kd = n - k equations."""
    ring = CoeffRing(n)
    factors = [ring.eps(j) for j in range(1, n + 1)]
    return _cleared_system(kd, factors, order, ring.nv)


def _cleared_system(count, factors, order, nv):
    sign = 1 if count % 2 == 0 else -1
    q1 = QSeries.q_power(order, 1, nv)

    def system(xs, want_jacobian=True):
        residuals = []
        jacobian = [] if want_jacobian else None
        for i in range(count):
            xi = xs[i]
            fulls = [1 - f * xi for f in factors]
            prod_all = QSeries.const(order, 1, nv)
            for p in fulls:
                prod_all = prod_all * p
            others = QSeries.const(order, 1, nv)
            for j in range(count):
                if j != i:
                    others = others * xs[j]
            res = prod_all * others + sign * q1 * xi ** (count - 1)
            residuals.append(res)
            if not want_jacobian:
                continue
            # d/dx of the factor product, by leaving one factor out at a time
            deriv = QSeries(order, {}, nv)
            for l, f in enumerate(factors):
                part = QSeries.const(order, -f, nv)
                for m, p in enumerate(fulls):
                    if m != l:
                        part = part * p
                deriv = deriv + part
            row = []
            for m in range(count):
                if m == i:
                    entry = deriv * others
                    if count >= 2:
                        entry = entry + \
                            (sign * (count - 1)) * q1 * xi ** (count - 2)
                else:
                    rest = QSeries.const(order, 1, nv)
                    for j in range(count):
                        if j != i and j != m:
                            rest = rest * xs[j]
                    entry = prod_all * rest
                row.append(entry)
            jacobian.append(row)
        return residuals, jacobian

    return system


def _solve_linear(mat, rhs):
    """Gaussian elimination over truncated series; pivots need a unit at q=0."""
    size = len(rhs)
    rows = [list(mat[i]) + [rhs[i]] for i in range(size)]
    for col in range(size):
        piv = None
        for r in range(col, size):
            if not rows[r][col].constant_term().is_zero():
                piv = r
                break
        if piv is None:
            raise DegeneracyError("singular linearized system at q = 0")
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = rows[col][col].invert()
        rows[col] = [e * inv for e in rows[col]]
        for r in range(size):
            if r != col:
                c = rows[r][col]
                if not c.is_zero():
                    rows[r] = [a - c * b for a, b in zip(rows[r], rows[col])]
    return [rows[i][size] for i in range(size)]


def newton_step(xs, system):
    res, jac = system(xs)
    if all(r.is_zero() for r in res):
        return xs
    delta = _solve_linear(jac, [-r for r in res])
    return [x + d for x, d in zip(xs, delta)]


def _invert_constant_matrix(mat):
    """Exact inverse of a square fraction matrix, by augmented elimination."""
    size = len(mat)
    nv = mat[0][0].nv
    one = RatScalar.from_laurent(LaurentScalar.const(nv, 1))
    zero = RatScalar.from_laurent(LaurentScalar.const(nv, 0))
    rows = [list(mat[i]) + [one if j == i else zero for j in range(size)]
            for i in range(size)]
    for col in range(size):
        piv = None
        for r in range(col, size):
            if not rows[r][col].is_zero():
                piv = r
                break
        if piv is None:
            raise DegeneracyError("singular linearized system at q = 0")
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = rows[col][col].inverse()
        rows[col] = [e * inv for e in rows[col]]
        for r in range(size):
            if r != col:
                c = rows[r][col]
                if not c.is_zero():
                    rows[r] = [a - c * b for a, b in zip(rows[r], rows[col])]
    return [row[size:] for row in rows]


def _hensel(xs, system, order):
    """Lift the exact q = 0 solution one q-degree at a time.

    The linearization is factored once at q = 0; each degree then costs one
    residual evaluation of inputs truncated to that degree plus a constant
    back-substitution, so the cheap low degrees stay cheap.
    """
    size = len(xs)
    res0, jac0 = system([x.truncate(0) for x in xs])
    if any(not r.is_zero() for r in res0):
        raise DegeneracyError("seed does not solve the q = 0 equations")
    inv0 = _invert_constant_matrix(
        [[e.constant_term() for e in row] for row in jac0])
    nv = xs[0].nv
    for d in range(1, order + 1):
        res, _ = system([x.truncate(d) for x in xs], want_jacobian=False)
        rd = [r.coefficient(d) for r in res]
        if all(c.is_zero() for c in rd):
            continue
        for i in range(size):
            ci = sum((inv0[i][m] * rd[m] for m in range(size)),
                     start=RatScalar.from_laurent(LaurentScalar.const(nv, 0)))
            if not ci.is_zero():
                xs[i] = xs[i] + QSeries(order, {d: -ci}, nv)
    res, _ = system(xs, want_jacobian=False)
    if any(not r.is_zero() for r in res):
        raise DegeneracyError("root refinement stalled before the target order")
    return xs


def residual_valuation(residuals):
    """Lowest q-power present across the residuals, or None when all vanish."""
    best = None
    for s in residuals:
        for d, c in s.coeffs.items():
            if not c.is_zero() and (best is None or d < best):
                best = d
    return best


_root_cache = {}
_dual_root_cache = {}


def solve_bae(lam, order):
    """The root series whose q=0 limit sits at the fixed point of lam."""
    key = (lam.n, lam.k, lam.parts, order)
    if key not in _root_cache:
        ring = CoeffRing(lam.n)
        xs = [QSeries.const(order, ring.eps(a), ring.nv)
              for a in lam.epsilon_index()]
        xs = _hensel(xs, bae_system(lam.k, lam.n, order), order)
        _root_cache[key] = BetheRoot(lam, order, xs)
    return _root_cache[key]


def dual_solve_bae(lam_prime, order):
    """Root series of the reflected equations, labeled in the flipped box."""
    n = lam_prime.n
    key = (n, lam_prime.k, lam_prime.parts, order)
    if key not in _dual_root_cache:
        ring = CoeffRing(n)
        xs = [QSeries.const(order, ring.eps(n + 1 - a, -1), ring.nv)
              for a in lam_prime.epsilon_index()]
        xs = _hensel(xs, dual_bae_system(lam_prime.k, n, order), order)
        _dual_root_cache[key] = BetheRoot(lam_prime, order, xs)
    return _dual_root_cache[key]


def bae_residuals(lam, xs):
    """The literal (uncleared) equations at the given series values."""
    ring = CoeffRing(lam.n)
    sign = 1 if lam.k % 2 == 0 else -1
    out = []
    for i, xi in enumerate(xs):
        term = sign * QSeries.q_power(xi.order, 1, ring.nv)
        prod = QSeries.const(xi.order, 1, ring.nv)
        for j in range(1, lam.n + 1):
            prod = prod * (1 - ring.eps(j, -1) * xi)
        inv_xi = xi.invert()
        for j, xj in enumerate(xs):
            if j != i:
                prod = prod * xj * inv_xi
        out.append(prod + term)
    return out


def dual_bae_residuals(lam_prime, xs):
    ring = CoeffRing(lam_prime.n)
    sign = 1 if lam_prime.k % 2 == 0 else -1
    out = []
    for i, xi in enumerate(xs):
        term = sign * QSeries.q_power(xi.order, 1, ring.nv)
        prod = QSeries.const(xi.order, 1, ring.nv)
        for j in range(1, lam_prime.n + 1):
            prod = prod * (1 - ring.eps(j) * xi)
        inv_xi = xi.invert()
        for j, xj in enumerate(xs):
            if j != i:
                prod = prod * xj * inv_xi
        out.append(prod + term)
    return out


# -- off-shell and on-shell vectors ------------------------------------------

def off_shell_vector(n, xs, inv_eps=None, one=None):
    """Repeated creation-operator sweeps from the vacuum, one per value."""
    xs = list(xs)
    if one is None and xs and isinstance(xs[0], QSeries):
        one = QSeries.const(xs[0].order, 1, xs[0].nv)
    v = ModuleElement.vacuum(n, one)
    for x in reversed(xs):
        v = apply_generator(1, 0, -x, v, inv_eps)
    return v


def bethe2spin_expansion(k, n, xs, inv_eps=None, one=None):
    """Schubert-basis expansion of the off-shell vector in closed form.

    Each coefficient is the complementary-shape Grothendieck polynomial at
    1 - x, with deformation values 1 - 1/e taken in reversed site order,
    scaled by the product of the x's over the fixed-point characters.
    """
    ring = CoeffRing(n)
    if inv_eps is None:
        inv_eps = lambda m: ring.eps(m, -1)
    if one is None:
        one = QSeries.const(xs[0].order, 1, ring.nv) \
            if xs and isinstance(xs[0], QSeries) else ring.one()
    zero = one - one
    xs = list(xs)
    values = [zero] * (2 * n)
    for i in range(1, n + 1):
        values[x_slot(n, i)] = one - xs[i - 1] if i <= k else one
    for j in range(1, n + 1):
        values[t_slot(n, j)] = one - inv_eps(n + 1 - j)
    lead = one
    for x in xs:
        lead = lead * x
    coeffs = {}
    for lam in all_partitions(k, n):
        c = evaluate_poly(groth_double(lam.complement()), values, one, zero)
        for a in lam.epsilon_index():
            c = c * inv_eps(a)
        coeffs[lam] = lead * c
    return ModuleElement(k, n, coeffs)


_vector_cache = {}


def on_shell_vector(lam, order):
    key = (lam.n, lam.k, lam.parts, order)
    if key not in _vector_cache:
        root = solve_bae(lam, order)
        _vector_cache[key] = BetheVector(lam, order, off_shell_vector(
            lam.n, root.roots,
            one=QSeries.const(order, 1, CoeffRing(lam.n).nv)))
    return _vector_cache[key]


def dual_on_shell(lam_prime, order):
    """On-shell vector built through the flipped side of the model.

    The label lives in the reflected box; the construction must land on the
    ordinary on-shell vector of the transposed label, and raises otherwise.
    """
    n = lam_prime.n
    root = dual_solve_bae(lam_prime, order)
    one = QSeries.const(order, 1, CoeffRing(n).nv)
    v = gamma(ModuleElement.vacuum(n, one))
    for x in reversed(root.roots):
        v = dual_generator(0, 1, -x, v)
    target = lam_prime.transpose()
    mate = on_shell_vector(target, order)
    if not (v - mate.element).is_zero():
        raise AssertionError("flipped-side vector missed its mate at %r"
                             % (target,))
    return BetheVector(target, order, v)


def classical_fixed_point(lam):
    """The q=0 limit every on-shell vector must reproduce."""
    return class_from_restrictions(lam.k, lam.n, {lam: euler_weight(lam)})


# -- transfer eigenvalues ----------------------------------------------------

def transfer_series(z, v):
    """Transfer matrix on series coefficients; q shifts the grading."""
    a = apply_generator(0, 0, z, v)
    b = apply_generator(1, 1, z, v)
    return a + b.map_coefficients(lambda c: c.shift(1))


def dual_transfer_series(z, v):
    a = dual_generator(0, 0, z, v)
    b = dual_generator(1, 1, z, v)
    return a + b.map_coefficients(lambda c: c.shift(1))


def eigenvalue_residual(lam, order):
    """Cleared eigenvalue identity at the root of lam, z in the y slot.

    prod_i(1 + z/x_i) t(z) b  -  (prod_j(1 + z/e_j) + q z^k / prod_i x_i) b,
    which must vanish through the truncation order.
    """
    ring = CoeffRing(lam.n)
    root = solve_bae(lam, order)
    b = on_shell_vector(lam, order).element
    z = QSeries.const(order, ring.y(), ring.nv)
    clear = QSeries.const(order, 1, ring.nv)
    inv_prod = QSeries.const(order, 1, ring.nv)
    for x in root.roots:
        inv_x = x.invert()
        clear = clear * (1 + z * inv_x)
        inv_prod = inv_prod * inv_x
    eigen = QSeries.const(order, 1, ring.nv)
    for j in range(1, lam.n + 1):
        eigen = eigen * (1 + z * ring.eps(j, -1))
    eigen = eigen + (z ** lam.k * inv_prod).shift(1)
    return transfer_series(z, b).scale(clear) - b.scale(eigen)


def dual_eigenvalue_residual(lam, order):
    """The flipped transfer acts on b_lam by prod_i(1 + z x_i), polynomially."""
    ring = CoeffRing(lam.n)
    root = solve_bae(lam, order)
    b = on_shell_vector(lam, order).element
    z = QSeries.const(order, ring.y(), ring.nv)
    eigen = QSeries.const(order, 1, ring.nv)
    for x in root.roots:
        eigen = eigen * (1 + z * x)
    return dual_transfer_series(z, b) - b.scale(eigen)


def cross_eigenvalue_residual(lam, order):
    """t(z) acts on b_lam by prod_j(1 + z x~_j) with the flipped-side roots."""
    ring = CoeffRing(lam.n)
    droot = dual_solve_bae(lam.transpose(), order)
    b = on_shell_vector(lam, order).element
    z = QSeries.const(order, ring.y(), ring.nv)
    eigen = QSeries.const(order, 1, ring.nv)
    for x in droot.roots:
        eigen = eigen * (1 + z * x)
    return transfer_series(z, b) - b.scale(eigen)


# -- quantum Euler classes and localization ----------------------------------

def _as_series(c, order, nv):
    if isinstance(c, QSeries):
        return c.truncate(order) if c.order > order else c
    return QSeries.const(order, c, nv)


_pair_matrix_cache = {}


def _pairing_series_matrix(k, n, order):
    key = (k, n, order)
    if key not in _pair_matrix_cache:
        _pair_matrix_cache[key] = {
            pair: val.to_qseries(order)
            for pair, val in pairing_matrix(k, n).items()}
    return _pair_matrix_cache[key]


def pair_series(a, b, order):
    """Series-bilinear extension of the exact Schubert-basis pairing."""
    if (a.k, a.n) != (b.k, b.n):
        raise ValueError("elements live in different modules")
    nv = CoeffRing(a.n).nv
    mat = _pairing_series_matrix(a.k, a.n, order)
    total = QSeries(order, {}, nv)
    for mu, cb in b.coeffs.items():
        # sum the matrix against one side first: the row sums stay small,
        # so the expensive products against the other side happen once each
        row = QSeries(order, {}, nv)
        for lam, ca in a.coeffs.items():
            row = row + _as_series(ca, order, nv) * mat[(lam, mu)]
        total = total + row * _as_series(cb, order, nv)
    return total


_euler_cache = {}


def quantum_euler(lam, order):
    """Self-pairing of the on-shell vector; deforms the fixed-point weight."""
    key = (lam.n, lam.k, lam.parts, order)
    if key not in _euler_cache:
        e = on_shell_vector(lam, order).element
        val = pair_series(e, e, order)
        if val.constant_term() != euler_weight(lam):
            raise AssertionError("constant term is not the classical weight")
        _euler_cache[key] = val
    return _euler_cache[key]


def quantum_localize(v, lam, order):
    """Pairing against the on-shell vector of lam, as a truncated series."""
    return pair_series(v, on_shell_vector(lam, order).element, order)


def quantum_restrict(mu, lam, order):
    """Closed form of quantum_localize on a basis class: the Grothendieck
    polynomial of mu at 1 - (roots of lam), with values 1 - 1/e."""
    n = lam.n
    ring = CoeffRing(n)
    root = solve_bae(lam, order)
    one = QSeries.const(order, 1, ring.nv)
    zero = QSeries(order, {}, ring.nv)
    values = [one] * (2 * n)
    for i in range(1, lam.k + 1):
        values[x_slot(n, i)] = one - root.roots[i - 1]
    for j in range(1, n + 1):
        values[t_slot(n, j)] = one - ring.eps(j, -1)
    return evaluate_poly(groth_double(mu), values, one, zero)


def quantum_atiyah_bott(v, order):
    """Sum of localized values over quantum Euler classes.

    Checked on the way out against the classical character spread over the
    geometric series, which is what the exact pairing with the unit gives.
    """
    ring = CoeffRing(v.n)
    total = QSeries(order, {}, ring.nv)
    for lam in all_partitions(v.k, v.n):
        total = total + \
            quantum_localize(v, lam, order) / quantum_euler(lam, order)
    one_rat = QSeries.const(order, 1, ring.nv).constant_term()
    geom = QSeries(order, {d: one_rat for d in range(order + 1)}, ring.nv)
    expected = geom * euler_char(v)
    if not (total - expected).is_zero():
        raise AssertionError("quantum character disagrees with the classical "
                             "character over 1 - q")
    return total


# -- root cache files ---------------------------------------------------------

def cache_path(base_dir, k, n, order):
    return os.path.join(base_dir, "%d_%d" % (n, k), "bethe_N%d.json" % order)


def save_roots(base_dir, k, n, order):
    """Solve every root at this order and write one document atomically."""
    doc = {"n": n, "k": k, "order": order,
           "roots": [solve_bae(lam, order).to_json()
                     for lam in all_partitions(k, n)]}
    path = cache_path(base_dir, k, n, order)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_roots(base_dir, k, n, order):
    """Read a root document into the in-process cache; returns the count."""
    path = cache_path(base_dir, k, n, order)
    with open(path) as fh:
        doc = json.load(fh)
    if (doc["n"], doc["k"], doc["order"]) != (n, k, order):
        raise ValueError("cache document does not match its path")
    count = 0
    for entry in doc["roots"]:
        root = BetheRoot.from_json(k, n, entry)
        _root_cache[(n, k, root.lam.parts, order)] = root
        count += 1
    return count


def clear_caches():
    _root_cache.clear()
    _dual_root_cache.clear()
    _vector_cache.clear()
    _pair_matrix_cache.clear()
    _euler_cache.clear()
