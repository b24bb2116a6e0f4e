"""Left Weyl-group action, Demazure operators, and the extended affine
symmetries: the rotation, the affine reflection, and the translations.

The simple reflection at i acts semilinearly: coefficients get e_i and
e_{i+1} exchanged, and a basis word J mixes with the swapped word exactly
when its letters descend across (i, i+1):

    s_i . (c (x) v_J) = a_i c' (x) v_J + (1 - a_i) c' (x) v_{swap J}

with a_i = e_i/e_{i+1} and c' the exchanged coefficient; otherwise the
basis vector rides along unchanged.  Demazure operators follow from the
reflection by one exact division.
"""

from .scalars import CoeffRing, LaurentScalar, RatScalar
from .vertex import ModuleElement, dual_transfer, transfer
from .shapes import BitWord, long_element, reduced_word


def _swap_coeff(c, i, n):
    """Exchange e_i and e_{i+1} in a coefficient (shared layout)."""
    image = list(range(c.nv))
    lo = CoeffRing.EPS_OFFSET
    image[lo + i - 1], image[lo + i] = lo + i, lo + i - 1
    return c.permute_slots(image)


def apply_simple(i, v):
    """The left action of the simple reflection at 1 <= i <= n-1."""
    n = v.n
    if not (1 <= i <= n - 1):
        raise ValueError("simple reflection index out of range")
    ring = CoeffRing(n)
    alpha = ring.alpha(i)
    out = ModuleElement.zero(v.k, n)
    for lam, c in v.coeffs.items():
        cs = _swap_coeff(c, i, n)
        word = lam.word()
        if word[i - 1] > word[i]:
            swapped = list(word)
            swapped[i - 1], swapped[i] = swapped[i], swapped[i - 1]
            mu = BitWord(swapped).partition()
            out = out + ModuleElement(v.k, n, {lam: cs * alpha})
            out = out + ModuleElement(v.k, n, {mu: cs * (1 - alpha)})
        else:
            out = out + ModuleElement(v.k, n, {lam: cs})
    return out


def apply_weyl_word(word, v):
    """Compose simple reflections; the last letter acts first."""
    for i in reversed(list(word)):
        v = apply_simple(i, v)
    return v


def apply_weyl_perm(w, v):
    """Action of a permutation through any reduced word."""
    return apply_weyl_word(reduced_word(w), v)


def apply_w0(v):
    return apply_weyl_perm(long_element(v.n), v)


def _coeff_divide(c, den):
    """Divide a coefficient by a Laurent denominator, staying exact."""
    if isinstance(c, LaurentScalar):
        return c.exact_divide(den)
    inv = RatScalar(LaurentScalar.const(den.nv, 1), den)
    return c * inv


def apply_demazure(i, v):
    """Demazure operator: (1 - a_i^{-1} s_i)/(1 - a_i^{-1}) applied on the left."""
    n = v.n
    ring = CoeffRing(n)
    inv_alpha = ring.alpha(i) ** -1
    num = v - apply_simple(i, v).scale(inv_alpha)
    den = 1 - inv_alpha
    return num.map_coefficients(lambda c: _coeff_divide(c, den))


def _rho_twist(c, n, inverse=False):
    """Rotate the equivariant parameters: forward sends e_1 to e_n and
    e_i to e_{i-1}; inverse undoes it."""
    image = list(range(c.nv))
    lo = CoeffRing.EPS_OFFSET
    if inverse:
        for i in range(1, n):
            image[lo + i - 1] = lo + i
        image[lo + n - 1] = lo
    else:
        image[lo] = lo + n - 1
        for i in range(2, n + 1):
            image[lo + i - 1] = lo + i - 2
    return c.permute_slots(image)


def apply_rho(v, q_val=None):
    """The rotation generator of the extended affine Weyl group."""
    n, k = v.n, v.k
    if q_val is None:
        q_val = CoeffRing(n).q()
    out = ModuleElement.zero(k, n)
    for lam, c in v.coeffs.items():
        ct = _rho_twist(c, n)
        if len(lam.parts) == k:
            mu = tuple(p - 1 for p in lam.parts)
            out = out + ModuleElement(k, n, {_box(k, n, mu): ct * q_val})
        else:
            mu = (n - k,) + lam.padded()[:k - 1]
            out = out + ModuleElement(k, n, {_box(k, n, mu): ct})
    return out


def apply_rho_inverse(v, q_inv_val=None):
    n, k = v.n, v.k
    if q_inv_val is None:
        q_inv_val = CoeffRing(n).q(-1)
    out = ModuleElement.zero(k, n)
    for lam, c in v.coeffs.items():
        ct = _rho_twist(c, n, inverse=True)
        padded = lam.padded()
        if lam.part(1) < n - k:
            mu = tuple(p + 1 for p in padded)
            out = out + ModuleElement(k, n, {_box(k, n, mu): ct * q_inv_val})
        else:
            mu = padded[1:]
            out = out + ModuleElement(k, n, {_box(k, n, mu): ct})
    return out


def _box(k, n, parts):
    from .shapes import BoxPartition
    return BoxPartition(k, n, parts)


def apply_s0(v):
    """The affine reflection.  A word starting 0 and ending 1 mixes with
    the word whose outer letters are swapped, at the cost of one q^{-1}."""
    n, k = v.n, v.k
    ring = CoeffRing(n)
    alpha0 = ring.eps(n) * ring.eps(1) ** -1
    q_inv = ring.q(-1)
    out = ModuleElement.zero(k, n)
    for lam, c in v.coeffs.items():
        cs = ring.swap_eps(c, 1, n) if n > 1 else c
        word = lam.word()
        if n > 1 and word[0] == 0 and word[-1] == 1:
            swapped = (word[-1],) + word[1:-1] + (word[0],)
            mu = BitWord(swapped).partition()
            out = out + ModuleElement(k, n, {lam: cs * alpha0})
            out = out + ModuleElement(
                k, n, {mu: cs * (1 - alpha0) * q_inv})
        else:
            out = out + ModuleElement(k, n, {lam: cs})
    return out


def apply_translation(i, v):
    """Translation by the i-th coweight: the transfer matrix at -e_i."""
    ring = CoeffRing(v.n)
    return transfer(-ring.eps(i), v)


def apply_translation_inverse(i, v):
    """Inverse translation: q^{-1} times the dual transfer at -1/e_i."""
    ring = CoeffRing(v.n)
    out = dual_transfer(-ring.eps(i, -1), v)
    return out.scale(ring.q(-1))
