"""The five-vertex lattice model: R-matrix, monodromy entries, transfer
matrices, and the level-rank flip.

A module element is a combination of Schubert basis vectors indexed by box
partitions; basis vectors correspond to 01-words with k zeros among n
letters.  A monodromy entry t_ij(y) acts by sweeping each word from site n
down to site 1 with a horizontal label that starts at j and must come out
as i; site m contributes a weight built from y and 1/e_m:

    horizontal 0 over letter 0:  keep both, weight 1
    horizontal 0 over letter 1:  keep both, weight 1 + y/e_m
                                 or swap to (1, 0), weight -y/e_m
    horizontal 1 over letter 0:  swap to (0, 1), weight 1
    horizontal 1 over letter 1:  keep both, weight 1

Those five admissible vertices force the y-degree of any entry to stay at
most n, and give t_01 and t_10 the zero-count shifts -1 and +1.
"""

from .scalars import CoeffRing, DimensionError, LaurentScalar
from .shapes import BitWord, BoxPartition


# (h_in, v_in) -> list of (h_out, v_out, kind); kinds name the weights
# 1, 1 + y/e_m and -y/e_m
VERTEX_TRANSITIONS = {
    (0, 0): [(0, 0, "one")],
    (0, 1): [(0, 1, "stay"), (1, 0, "switch")],
    (1, 0): [(0, 1, "one")],
    (1, 1): [(1, 1, "one")],
}


class VertexWeightTable:
    """Site weights for a fixed spectral value y and equivariant slot m."""

    __slots__ = ("stay", "switch", "one")

    def __init__(self, y_val, inv_eps):
        self.one = 1
        self.stay = 1 + y_val * inv_eps
        self.switch = -(y_val * inv_eps)

    def weight(self, kind):
        return getattr(self, kind)


class ModuleElement:
    """Finite combination of Schubert basis vectors for fixed (k, n).

    Coefficients may be LaurentScalar, RatScalar, or QSeries values; all
    that is used is their arithmetic and their is_zero test.
    """

    __slots__ = ("k", "n", "coeffs")

    def __init__(self, k, n, coeffs=None):
        self.k = k
        self.n = n
        clean = {}
        if coeffs:
            for lam, c in coeffs.items():
                if (lam.k, lam.n) != (k, n):
                    raise DimensionError("partition outside this module")
                if not c.is_zero():
                    clean[lam] = c
        self.coeffs = clean

    @classmethod
    def basis(cls, k, n, lam, one=None):
        if not isinstance(lam, BoxPartition):
            lam = BoxPartition(k, n, lam)
        if one is None:
            one = CoeffRing(n).one()
        return cls(k, n, {lam: one})

    @classmethod
    def zero(cls, k, n):
        return cls(k, n)

    @classmethod
    def vacuum(cls, n, one=None):
        """The all-ones word: the empty partition at k = 0."""
        return cls.basis(0, n, BoxPartition(0, n), one)

    def coefficient(self, lam, default=None):
        return self.coeffs.get(lam, default)

    def support(self):
        return sorted(self.coeffs, key=lambda p: (p.size(), p.parts))

    def is_zero(self):
        return not self.coeffs

    def _check(self, other):
        if not isinstance(other, ModuleElement):
            raise TypeError("expected a ModuleElement")
        if (other.k, other.n) != (self.k, self.n):
            raise DimensionError("elements live in different modules")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for lam, c in other.coeffs.items():
            s = out[lam] + c if lam in out else c
            if s.is_zero():
                out.pop(lam, None)
            else:
                out[lam] = s
        r = ModuleElement(self.k, self.n)
        r.coeffs = out
        return r

    def __neg__(self):
        r = ModuleElement(self.k, self.n)
        r.coeffs = {lam: -c for lam, c in self.coeffs.items()}
        return r

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar):
        out = {}
        for lam, c in self.coeffs.items():
            p = c * scalar
            if not p.is_zero():
                out[lam] = p
        r = ModuleElement(self.k, self.n)
        r.coeffs = out
        return r

    def __mul__(self, scalar):
        return self.scale(scalar)

    __rmul__ = __mul__

    def map_coefficients(self, fn):
        out = {}
        for lam, c in self.coeffs.items():
            v = fn(c)
            if not v.is_zero():
                out[lam] = v
        r = ModuleElement(self.k, self.n)
        r.coeffs = out
        return r

    def __eq__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        if (self.k, self.n) != (other.k, other.n):
            return False
        if self.coeffs.keys() != other.coeffs.keys():
            return False
        return all(self.coeffs[lam] == other.coeffs[lam]
                   for lam in self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "ModuleElement(k=%d, n=%d, 0)" % (self.k, self.n)
        bits = ["(%r) * O%s" % (c, list(lam.parts))
                for lam, c in sorted(self.coeffs.items(),
                                     key=lambda t: (t[0].size(), t[0].parts))]
        return "ModuleElement(k=%d, n=%d, %s)" % (self.k, self.n,
                                                  " + ".join(bits))

    def to_json(self):
        ring = _ring_tag(next(iter(self.coeffs.values()))) if self.coeffs \
            else "laurent"
        names = CoeffRing(self.n).var_names()
        return {
            "k": self.k,
            "n": self.n,
            "ring": ring,
            "coeffs": [{"partition": list(lam.parts),
                        "value": c.to_json(names) if ring == "laurent"
                        else c.to_json()}
                       for lam, c in sorted(self.coeffs.items(),
                                            key=lambda t: (t[0].size(),
                                                           t[0].parts))],
        }

    @classmethod
    def from_json(cls, doc):
        from .scalars import QSeries, RatScalar
        loader = {"laurent": LaurentScalar, "rat": RatScalar,
                  "qseries": QSeries}[doc["ring"]]
        coeffs = {}
        for item in doc["coeffs"]:
            lam = BoxPartition(doc["k"], doc["n"], item["partition"])
            coeffs[lam] = loader.from_json(item["value"])
        return cls(doc["k"], doc["n"], coeffs)


def _ring_tag(c):
    from .scalars import QSeries, RatScalar
    if isinstance(c, LaurentScalar):
        return "laurent"
    if isinstance(c, RatScalar):
        return "rat"
    if isinstance(c, QSeries):
        return "qseries"
    raise TypeError("unknown coefficient type %r" % type(c))


def _sweep(i, j, word, tables):
    """All output words of one monodromy sweep with their weights.

    tables[m] holds the site-m weights; the horizontal label enters site n
    as j and must leave site 1 as i.
    """
    n = len(word)
    results = []
    out = [0] * n

    def rec(m, h, weight):
        if m == 0:
            if h == i:
                results.append((tuple(out), weight))
            return
        v = word[m - 1]
        for h_out, v_out, kind in VERTEX_TRANSITIONS[(h, v)]:
            out[m - 1] = v_out
            w = weight if kind == "one" else \
                (tables[m].weight(kind) if weight is None
                 else weight * tables[m].weight(kind))
            rec(m - 1, h_out, w)

    rec(n, j, None)
    return results


def apply_generator(i, j, y_val, v, inv_eps=None):
    """Monodromy entry t_ij(y) applied to a module element.

    ``inv_eps`` maps a site index m to 1/e_m in the coefficient ring;
    by default the Laurent monomial in the shared (q, y, e) layout.
    """
    if i not in (0, 1) or j not in (0, 1):
        raise ValueError("generator indices must be 0 or 1")
    n = v.n
    if inv_eps is None:
        ring = CoeffRing(n)
        inv_eps = lambda m: ring.eps(m, -1)
    tables = {m: VertexWeightTable(y_val, inv_eps(m)) for m in range(1, n + 1)}
    k_out = v.k + (i - j)
    if k_out < 0 or k_out > n:
        return ModuleElement.zero(min(max(k_out, 0), n), n)
    acc = {}
    for lam, c in v.coeffs.items():
        word = lam.word()
        for out_word, weight in _sweep(i, j, word, tables):
            mu = BitWord(out_word).partition()
            term = c if weight is None else c * weight
            if mu in acc:
                acc[mu] = acc[mu] + term
            else:
                acc[mu] = term
    return ModuleElement(k_out, n, acc)


def transfer(y_val, v, q_val=None, inv_eps=None):
    """t(y) = t_00(y) + q t_11(y), multiplication by the dual-bundle class."""
    if q_val is None:
        q_val = CoeffRing(v.n).q()
    a = apply_generator(0, 0, y_val, v, inv_eps)
    b = apply_generator(1, 1, y_val, v, inv_eps)
    return a + b.scale(q_val)


def gamma(v, eps_lo=None):
    """Level-rank flip: words reverse and negate, so partitions transpose,
    and every coefficient has its equivariant parameters reversed and
    inverted (q and y untouched).  An involution.

    ``eps_lo`` locates e_1 in the coefficient layout (default: the shared
    (q, y, e) layout).
    """
    n = v.n
    lo = CoeffRing.EPS_OFFSET if eps_lo is None else eps_lo
    acc = {}
    for lam, c in v.coeffs.items():
        word = lam.word()
        flipped = tuple(1 - word[n - m] for m in range(1, n + 1))
        mu = BitWord(flipped).partition()
        acc[mu] = c.reverse_invert_slots(lo, lo + n)
    return ModuleElement(n - v.k, n, acc)


def _twist_value(y_val, n, lo):
    if isinstance(y_val, int):
        return y_val
    return y_val.reverse_invert_slots(lo, lo + n)


def dual_generator(i, j, y_val, v, inv_eps=None, eps_lo=None):
    """Dual monodromy entry, conjugate of t_ji by the level-rank flip.

    The spectral value is twisted on the way in so that a value involving
    the e's is substituted after conjugation, not before.
    """
    lo = CoeffRing.EPS_OFFSET if eps_lo is None else eps_lo
    inner = apply_generator(j, i, _twist_value(y_val, v.n, lo),
                            gamma(v, lo), inv_eps)
    return gamma(inner, lo)


def dual_transfer(y_val, v, q_val=None, inv_eps=None, eps_lo=None):
    """Dual transfer matrix, multiplication by the tautological-bundle class."""
    if q_val is None:
        q_val = CoeffRing(v.n).q()
    a = dual_generator(0, 0, y_val, v, inv_eps, eps_lo)
    b = dual_generator(1, 1, y_val, v, inv_eps, eps_lo)
    return a + b.scale(q_val)


# -- R-matrix and its exchange relation ------------------------------------

def r_matrix(z, variant="standard"):
    """4x4 matrix on V (x) V, basis (00, 01, 10, 11), entries over the
    ring of z.  The middle block is [[1-z, z], [1, 0]]; the dual variant
    transposes that block."""
    one = z * 0 + 1
    zero = z * 0
    m = [[one, zero, zero, zero],
         [zero, one - z, z, zero],
         [zero, one, zero, zero],
         [zero, zero, zero, one]]
    if variant == "dual":
        m[1][1], m[1][2], m[2][1], m[2][2] = m[1][1], m[2][1], m[1][2], m[2][2]
    elif variant != "standard":
        raise ValueError("variant must be standard or dual")
    return m


def mat_mul(a, b):
    size = len(a)
    return [[sum_products(a[r], [b[s][c] for s in range(size)])
             for c in range(size)] for r in range(size)]


def sum_products(row, col):
    acc = None
    for x, y in zip(row, col):
        t = x * y
        acc = t if acc is None else acc + t
    return acc


def lift_two_site(m4, pos, z_sub=None):
    """Embed a 4x4 matrix into the 8x8 algebra of three tensor factors,
    acting on the pair of factors ``pos`` (one of (0,1), (0,2), (1,2))."""
    a, b = pos
    out = [[None] * 8 for _ in range(8)]
    for r in range(8):
        rb = [(r >> (2 - t)) & 1 for t in range(3)]
        for c in range(8):
            cb = [(c >> (2 - t)) & 1 for t in range(3)]
            spectators = [t for t in range(3) if t not in pos]
            if any(rb[t] != cb[t] for t in spectators):
                val = m4[0][0] * 0
            else:
                val = m4[2 * rb[a] + rb[b]][2 * cb[a] + cb[b]]
            out[r][c] = val
    return out


def qybe_check(variant="standard", perturb=None):
    """Exchange relation R_12(z/w) R_13(z) R_23(w) = R_23(w) R_13(z) R_12(z/w)
    checked symbolically over Z[z^{+-1}, w^{+-1}].  ``perturb`` optionally
    alters one 4x4 entry, e.g. to confirm the check can fail."""
    z = LaurentScalar.monomial(2, 0)
    w = LaurentScalar.monomial(2, 1)
    zw = z * w ** -1

    def rmat(u):
        m = r_matrix(u, variant)
        if perturb is not None:
            r, c, delta = perturb
            m[r][c] = m[r][c] + delta
        return m

    left = mat_mul(mat_mul(lift_two_site(rmat(zw), (0, 1)),
                           lift_two_site(rmat(z), (0, 2))),
                   lift_two_site(rmat(w), (1, 2)))
    right = mat_mul(mat_mul(lift_two_site(rmat(w), (1, 2)),
                            lift_two_site(rmat(z), (0, 2))),
                    lift_two_site(rmat(zw), (0, 1)))
    return all(left[r][c] == right[r][c] for r in range(8) for c in range(8))


def unitarity_check():
    """R(z) P R(1/z) P = identity, with P the flip of the two factors."""
    z = LaurentScalar.monomial(1, 0)
    m = r_matrix(z)
    minv = r_matrix(z ** -1)
    # conjugating by P swaps the middle two basis vectors
    perm = [0, 2, 1, 3]
    conj = [[minv[perm[r]][perm[c]] for c in range(4)] for r in range(4)]
    prod = mat_mul(m, conj)
    one = LaurentScalar.const(1, 1)
    zero = LaurentScalar(1)
    return all(prod[r][c] == (one if r == c else zero)
               for r in range(4) for c in range(4))
