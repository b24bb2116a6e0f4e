"""Left Weyl action, Demazure operators, rotation, affine reflection,
translations, and the relations tying them together."""

from itertools import product as iproduct

import pytest

from qkgr.scalars import CoeffRing
from qkgr.shapes import BoxPartition, all_partitions
from qkgr.vertex import ModuleElement, apply_generator
from qkgr.weyl import (
    apply_demazure, apply_rho, apply_rho_inverse, apply_s0, apply_simple,
    apply_translation, apply_translation_inverse, apply_w0, apply_weyl_word,
)


def basis(k, n, parts=()):
    return ModuleElement.basis(k, n, parts)


def every_basis(n, ks=None):
    for k in (ks if ks is not None else range(n + 1)):
        for lam in all_partitions(k, n):
            yield basis(k, n, lam.parts)


class TestSimpleReflection:

    def test_descent_mixing_gr12(self):
        ring = CoeffRing(2)
        alpha = ring.alpha(1)
        out = apply_simple(1, basis(1, 2, (1,)))
        expect = basis(1, 2, (1,)).scale(alpha) + basis(1, 2).scale(1 - alpha)
        assert out == expect

    def test_fixes_empty_gr12(self):
        assert apply_simple(1, basis(1, 2)) == basis(1, 2)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_involution(self, n):
        for v in every_basis(n):
            for i in range(1, n):
                assert apply_simple(i, apply_simple(i, v)) == v

    @pytest.mark.parametrize("n", [3, 4])
    def test_braid(self, n):
        for v in every_basis(n):
            for i in range(1, n - 1):
                left = apply_weyl_word([i, i + 1, i], v)
                right = apply_weyl_word([i + 1, i, i + 1], v)
                assert left == right

    @pytest.mark.parametrize("n", [3, 4])
    def test_distant_commute(self, n):
        for v in every_basis(n):
            for i in range(1, n - 2):
                for j in range(i + 2, n):
                    assert apply_weyl_word([i, j], v) == \
                        apply_weyl_word([j, i], v)

    def test_semilinearity(self):
        ring = CoeffRing(2)
        v = basis(1, 2).scale(ring.eps(1))
        out = apply_simple(1, v)
        assert out == basis(1, 2).scale(ring.eps(2))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_commutes_with_monodromy(self, n):
        # the left action commutes with every t_ij(y), entrywise
        ring = CoeffRing(n)
        y = ring.y()
        for v in every_basis(n):
            for i in range(1, n):
                for a, b in iproduct((0, 1), (0, 1)):
                    lhs = apply_simple(i, apply_generator(a, b, y, v))
                    rhs = apply_generator(a, b, y, apply_simple(i, v))
                    assert lhs == rhs


class TestDemazure:

    def test_lowers_box_gr12(self):
        assert apply_demazure(1, basis(1, 2, (1,))) == basis(1, 2)

    def test_fixes_empty(self):
        assert apply_demazure(1, basis(1, 2)) == basis(1, 2)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_idempotent(self, n):
        for v in every_basis(n):
            for i in range(1, n):
                once = apply_demazure(i, v)
                assert apply_demazure(i, once) == once

    @pytest.mark.parametrize("n", [3])
    def test_braid(self, n):
        for v in every_basis(n):
            for i in range(1, n - 1):
                left, right = v, v
                for s in [i, i + 1, i]:
                    left = apply_demazure(s, left)
                for s in [i + 1, i, i + 1]:
                    right = apply_demazure(s, right)
                assert left == right

    def test_word_action_on_schubert_basis(self):
        # on a descent, the Demazure operator moves O down by one box
        out = apply_demazure(1, basis(2, 4, (1, 1)))
        assert out == basis(2, 4, (1,))


class TestRho:

    def test_gr12_table(self):
        ring = CoeffRing(2)
        assert apply_rho(basis(1, 2)) == basis(1, 2, (1,))
        assert apply_rho(basis(1, 2, (1,))) == basis(1, 2).scale(ring.q())

    def test_k0_and_kn(self):
        ring = CoeffRing(2)
        vac = ModuleElement.vacuum(2)
        assert apply_rho(vac) == vac.scale(ring.q())
        full = basis(2, 2)
        assert apply_rho(full) == full

    @pytest.mark.parametrize("k,n", [(1, 2), (1, 3), (2, 3), (2, 4), (1, 5), (3, 5)])
    def test_power_is_q_shift(self, k, n):
        ring = CoeffRing(n)
        for lam in all_partitions(k, n):
            v = basis(k, n, lam.parts)
            out = v
            for _ in range(n):
                out = apply_rho(out)
            assert out == v.scale(ring.q(n - k))

    @pytest.mark.parametrize("k,n", [(1, 2), (1, 3), (2, 3), (2, 4)])
    def test_inverse(self, k, n):
        for lam in all_partitions(k, n):
            v = basis(k, n, lam.parts)
            assert apply_rho_inverse(apply_rho(v)) == v
            assert apply_rho(apply_rho_inverse(v)) == v

    def test_twist_on_coefficients(self):
        ring = CoeffRing(3)
        v = basis(1, 3).scale(ring.eps(1))
        out = apply_rho(v)
        (c,) = out.coeffs.values()
        assert c == ring.eps(3)

    @pytest.mark.parametrize("n", [3, 4])
    def test_intertwines_simple_reflections(self, n):
        # rho s_i = s_{i-1} rho for 2 <= i <= n-1
        for v in every_basis(n, ks=[1, 2]):
            for i in range(2, n):
                assert apply_rho(apply_simple(i, v)) == \
                    apply_simple(i - 1, apply_rho(v))


class TestS0:

    def test_gr12_table(self):
        ring = CoeffRing(2)
        inv_alpha = ring.alpha(1) ** -1
        out = apply_s0(basis(1, 2))
        expect = basis(1, 2).scale(inv_alpha) + \
            basis(1, 2, (1,)).scale((1 - inv_alpha) * ring.q(-1))
        assert out == expect
        assert apply_s0(basis(1, 2, (1,))) == basis(1, 2, (1,))

    @pytest.mark.parametrize("k,n", [(1, 3), (2, 3), (2, 4)])
    def test_fixes_point_class(self, k, n):
        pt = basis(k, n, ((n - k),) * k)
        assert apply_s0(pt) == pt

    @pytest.mark.parametrize("k,n", [(1, 3), (2, 3), (2, 4)])
    def test_empty_mixes_with_hook(self, k, n):
        ring = CoeffRing(n)
        alpha0 = ring.eps(n) * ring.eps(1) ** -1
        hook = (n - k,) + (1,) * (k - 1)
        out = apply_s0(basis(k, n))
        expect = basis(k, n).scale(alpha0) + \
            basis(k, n, hook).scale((1 - alpha0) * ring.q(-1))
        assert out == expect

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_involution(self, n):
        for v in every_basis(n):
            assert apply_s0(apply_s0(v)) == v


class TestTranslations:

    def test_gr12_table(self):
        ring = CoeffRing(2)
        alpha = ring.alpha(1)
        assert apply_translation(1, basis(1, 2)) == \
            basis(1, 2).scale(1 - alpha) + basis(1, 2, (1,)).scale(alpha)
        assert apply_translation(2, basis(1, 2)) == basis(1, 2, (1,))
        assert apply_translation(1, basis(1, 2, (1,))) == \
            basis(1, 2).scale(ring.q())
        out = apply_translation(2, basis(1, 2, (1,)))
        inv_alpha = ring.alpha(1) ** -1
        expect = basis(1, 2).scale(inv_alpha * ring.q()) + \
            basis(1, 2, (1,)).scale(1 - inv_alpha)
        assert out == expect

    @pytest.mark.parametrize("n", [2, 3])
    def test_two_sided_inverse(self, n):
        for v in every_basis(n, ks=range(1, n)):
            for i in range(1, n + 1):
                assert apply_translation_inverse(
                    i, apply_translation(i, v)) == v
                assert apply_translation(
                    i, apply_translation_inverse(i, v)) == v

    @pytest.mark.parametrize("n", [2, 3])
    def test_translations_commute(self, n):
        for v in every_basis(n, ks=[1]):
            for i in range(1, n + 1):
                for j in range(i + 1, n + 1):
                    assert apply_translation(i, apply_translation(j, v)) == \
                        apply_translation(j, apply_translation(i, v))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_rho_factorizations(self, n):
        # rho = s_{n-1} .. s_1 t_1  and  t_i = s_i .. s_{n-1} rho s_1 .. s_{i-1}
        for v in every_basis(n, ks=[1, n - 1]):
            via_t1 = apply_weyl_word(range(n - 1, 0, -1),
                                     apply_translation(1, v))
            assert via_t1 == apply_rho(v)
            for i in range(1, n + 1):
                inner = apply_weyl_word(range(1, i), v)
                inner = apply_rho(inner)
                inner = apply_weyl_word(range(i, n), inner)
                assert inner == apply_translation(i, v)

    @pytest.mark.parametrize("k,n", [(1, 2), (1, 3), (2, 3), (2, 4)])
    def test_seidel_case_split(self, n, k):
        # t_n s_{n-1} .. s_1 acts as the rotation's case split
        ring = CoeffRing(n)
        for lam in all_partitions(k, n):
            v = basis(k, n, lam.parts)
            moved = apply_translation(n, apply_weyl_word(range(n - 1, 0, -1), v))
            if len(lam.parts) == k:
                mu = tuple(p - 1 for p in lam.parts)
                assert moved == basis(k, n, mu).scale(ring.q())
            else:
                mu = (n - k,) + lam.padded()[:k - 1]
                assert moved == basis(k, n, mu)

    def test_w0_long_action(self):
        # w0 on Gr(1,2) swaps the two classes up to the usual mixing
        ring = CoeffRing(2)
        out = apply_w0(basis(1, 2, (1,)))
        alpha = ring.alpha(1)
        assert out == basis(1, 2, (1,)).scale(alpha) + \
            basis(1, 2).scale(1 - alpha)
