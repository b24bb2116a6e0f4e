"""Root series for the cleared equations, on-shell vectors and their
eigenvalues, the flipped-side construction, quantum Euler classes, the
quantum localization map, and the quantum character."""

import os
import shutil
import tempfile

import pytest
from hypothesis import given, settings, strategies as st

from qkgr.scalars import CoeffRing, LaurentScalar, QSeries, RatScalar
from qkgr.shapes import BoxPartition, all_partitions
from qkgr.vertex import ModuleElement
from qkgr import bethe, localization as loc


def ring(n):
    return CoeffRing(n)


def shape(k, n, parts):
    return BoxPartition(k, n, parts)


def rat(value):
    return RatScalar.from_laurent(value)


SMALL = [(1, 2), (1, 3), (2, 3)]


class TestRootSeries:
    def test_projective_line_first_order_root(self):
        r = ring(2)
        x = bethe.solve_bae(shape(1, 2, ()), 1).roots[0]
        assert x.coefficient(0) == rat(r.eps(1))
        assert x.coefficient(1) == RatScalar(r.eps(1) * r.eps(2),
                                             r.eps(1) - r.eps(2))

    @pytest.mark.parametrize("k,n,parts",
                             [(1, 3, (2,)), (2, 3, (1, 1)), (2, 4, (1,))])
    def test_seed_sits_at_the_fixed_point(self, k, n, parts):
        lam = shape(k, n, parts)
        root = bethe.solve_bae(lam, 0)
        r = ring(n)
        for s, a in zip(root.roots, lam.epsilon_index()):
            assert s.coefficient(0) == rat(r.eps(a))

    @pytest.mark.parametrize("k,n", SMALL)
    def test_cleared_residuals_vanish_identically(self, k, n):
        system = bethe.bae_system(k, n, 3)
        for lam in all_partitions(k, n):
            res, _ = system(bethe.solve_bae(lam, 3).roots)
            assert bethe.residual_valuation(res) is None

    @pytest.mark.parametrize("k,n", SMALL)
    def test_literal_residuals_vanish_identically(self, k, n):
        for lam in all_partitions(k, n):
            root = bethe.solve_bae(lam, 3)
            res = bethe.bae_residuals(lam, root.roots)
            assert bethe.residual_valuation(res) is None

    def test_roots_are_cached_per_label_and_order(self):
        lam = shape(1, 2, (1,))
        assert bethe.solve_bae(lam, 2) is bethe.solve_bae(lam, 2)


class TestOffShellVector:
    def test_projective_line_formal_coefficients(self):
        # one formal creation value x in an extended slot
        nv = 2 + 2 + 1
        x = LaurentScalar.monomial(nv, 4)
        inv_eps = lambda m: LaurentScalar.monomial(nv, m + 1, -1)
        one = LaurentScalar.const(nv, 1)
        v = bethe.off_shell_vector(2, [x], inv_eps=inv_eps, one=one)
        e1i = LaurentScalar.monomial(nv, 2, -1)
        e2i = LaurentScalar.monomial(nv, 3, -1)
        assert v.coefficient(shape(1, 2, ())) == x * e1i * (1 - x * e2i)
        assert v.coefficient(shape(1, 2, (1,))) == x * e2i

    @pytest.mark.parametrize("k,n", SMALL)
    def test_closed_form_expansion_matches_sweeps(self, k, n):
        nv = n + 2 + k
        inv_eps = lambda m: LaurentScalar.monomial(nv, m + 1, -1)
        one = LaurentScalar.const(nv, 1)
        xs = [LaurentScalar.monomial(nv, n + 2 + i) for i in range(k)]
        a = bethe.off_shell_vector(n, xs, inv_eps=inv_eps, one=one)
        b = bethe.bethe2spin_expansion(k, n, xs, inv_eps=inv_eps, one=one)
        assert (a - b).is_zero()

    @settings(max_examples=20, deadline=None)
    @given(st.integers(-3, 3), st.integers(-3, 3))
    def test_expansion_agrees_at_integer_points(self, a, b):
        r = ring(3)
        xs = [LaurentScalar.const(r.nv, a), LaurentScalar.const(r.nv, b)]
        got = bethe.bethe2spin_expansion(2, 3, xs, one=r.one())
        want = bethe.off_shell_vector(3, xs, one=r.one())
        assert (got - want).is_zero()

    def test_expansion_matches_on_shell_vector(self):
        lam = shape(2, 3, (1,))
        root = bethe.solve_bae(lam, 2)
        got = bethe.bethe2spin_expansion(2, 3, root.roots)
        assert (got - bethe.on_shell_vector(lam, 2).element).is_zero()


class TestOnShellVector:
    def test_projective_line_empty_label(self):
        # (x/e1)(1 - x/e2) on the unit class plus (x/e2) on the point
        r = ring(2)
        x = bethe.solve_bae(shape(1, 2, ()), 2).roots[0]
        v = bethe.on_shell_vector(shape(1, 2, ()), 2).element
        inv_e1 = rat(r.eps(1)).inverse()
        inv_e2 = rat(r.eps(2)).inverse()
        want_empty = x * inv_e1 * (1 - x * inv_e2)
        assert (v.coefficient(shape(1, 2, ())) - want_empty).is_zero()
        assert (v.coefficient(shape(1, 2, (1,))) - x * inv_e2).is_zero()

    @pytest.mark.parametrize("k,n", SMALL)
    def test_constant_term_is_the_fixed_point_class(self, k, n):
        for lam in all_partitions(k, n):
            v = bethe.on_shell_vector(lam, 2).element
            q0 = v.map_coefficients(lambda c: c.coefficient(0))
            cls = bethe.classical_fixed_point(lam).map_coefficients(
                lambda c: rat(c) if isinstance(c, LaurentScalar) else c)
            assert (q0 - cls).is_zero()

    @pytest.mark.parametrize("k,n", SMALL)
    def test_transfer_eigenvalue_identity(self, k, n):
        for lam in all_partitions(k, n):
            assert bethe.eigenvalue_residual(lam, 2).is_zero()

    @pytest.mark.parametrize("k,n", SMALL)
    def test_flipped_transfer_eigenvalue_identity(self, k, n):
        for lam in all_partitions(k, n):
            assert bethe.dual_eigenvalue_residual(lam, 2).is_zero()

    @pytest.mark.parametrize("k,n", SMALL)
    def test_transfer_eigenvalue_from_flipped_roots(self, k, n):
        for lam in all_partitions(k, n):
            assert bethe.cross_eigenvalue_residual(lam, 2).is_zero()


class TestFlippedSide:
    @pytest.mark.parametrize("k,n", SMALL)
    def test_flip_lands_on_the_transposed_label(self, k, n):
        # dual_on_shell itself checks the expansions agree; the label it
        # reports must be the transpose of the flipped-box label
        for lp in all_partitions(n - k, n):
            bv = bethe.dual_on_shell(lp, 2)
            assert bv.lam == lp.transpose()

    def test_two_column_label_transposes(self):
        bv = bethe.dual_on_shell(shape(2, 3, (1, 1)), 2)
        assert bv.lam == shape(1, 3, (2,))
        bv = bethe.dual_on_shell(shape(1, 3, (2,)), 2)
        assert bv.lam == shape(2, 3, (1, 1))

    def test_flipped_seed_uses_reflected_inverse_weights(self):
        r = ring(3)
        root = bethe.dual_solve_bae(shape(2, 3, ()), 0)
        # labels live in the flipped box, seeds at 1/e_{n+1-a}
        idx = shape(2, 3, ()).epsilon_index()
        for s, a in zip(root.roots, idx):
            assert s.coefficient(0) == rat(r.eps(4 - a, -1))

    @pytest.mark.parametrize("k,n", SMALL)
    def test_flipped_residuals_vanish_identically(self, k, n):
        for lp in all_partitions(n - k, n):
            root = bethe.dual_solve_bae(lp, 2)
            res = bethe.dual_bae_residuals(lp, root.roots)
            assert bethe.residual_valuation(res) is None


class TestPairings:
    @pytest.mark.parametrize("k,n", SMALL)
    def test_distinct_labels_are_orthogonal(self, k, n):
        pts = all_partitions(k, n)
        vecs = {lam: bethe.on_shell_vector(lam, 2).element for lam in pts}
        for i, lam in enumerate(pts):
            for mu in pts[i + 1:]:
                assert bethe.pair_series(vecs[lam], vecs[mu], 2).is_zero()

    def test_series_pairing_extends_the_exact_one(self):
        r = ring(2)
        a = ModuleElement.basis(1, 2, shape(1, 2, (1,)))
        got = bethe.pair_series(a, a, 3)
        ratio = rat(r.eps(2)) / rat(r.eps(1))
        one = rat(r.one())
        # (1 - ratio + ratio q)/(1 - q) spread out to the truncation order
        want = QSeries(3, {0: 1 - ratio, 1: one, 2: one, 3: one}, r.nv)
        assert (got - want).is_zero()


class TestQuantumEuler:
    def test_projective_line_empty_label(self):
        r = ring(2)
        x = bethe.solve_bae(shape(1, 2, ()), 3).roots[0]
        eu = bethe.quantum_euler(shape(1, 2, ()), 3)
        inv = rat(r.eps(1) * r.eps(2)).inverse()
        want = 1 - QSeries.q_power(3, 1, r.nv) - x * x * inv
        assert (eu - want).is_zero()

    @pytest.mark.parametrize("k,n", SMALL)
    def test_constant_term_is_the_classical_weight(self, k, n):
        for lam in all_partitions(k, n):
            eu = bethe.quantum_euler(lam, 1)
            assert eu.coefficient(0) == rat(loc.euler_weight(lam))

    @pytest.mark.parametrize("k,n", SMALL)
    def test_weyl_orbit_of_the_base_label(self, k, n):
        r = ring(n)
        base = bethe.quantum_euler(shape(k, n, ()), 2)
        for lam in all_partitions(k, n):
            got = bethe.quantum_euler(lam, 2)
            assert (got - r.weyl_permute(base, lam.perm())).is_zero()


class TestQuantumLocalization:
    def test_projective_line_point_at_empty(self):
        r = ring(2)
        x = bethe.solve_bae(shape(1, 2, ()), 3).roots[0]
        v = ModuleElement.basis(1, 2, shape(1, 2, (1,)))
        got = bethe.quantum_localize(v, shape(1, 2, ()), 3)
        assert (got - (1 - x * rat(r.eps(1)).inverse())).is_zero()

    @pytest.mark.parametrize("k,n", SMALL)
    def test_pairing_matches_the_closed_form(self, k, n):
        for lam in all_partitions(k, n):
            for mu in all_partitions(k, n):
                a = bethe.quantum_localize(
                    ModuleElement.basis(k, n, mu), lam, 3)
                b = bethe.quantum_restrict(mu, lam, 3)
                assert (a - b).is_zero()


class TestQuantumCharacter:
    def test_unit_class_spreads_over_the_geometric_series(self):
        got = bethe.quantum_atiyah_bott(
            ModuleElement.basis(1, 2, shape(1, 2, ())), 3)
        one = rat(ring(2).one())
        assert all(got.coefficient(d) == one for d in range(4))

    def test_determinant_of_quotient_on_projective_line(self):
        r = ring(2)
        got = bethe.quantum_atiyah_bott(loc.wedge_class(1, 2, "Q", 1), 3)
        want = rat(r.eps(1) + r.eps(2))
        assert all(got.coefficient(d) == want for d in range(4))

    @pytest.mark.parametrize("k,n", [(1, 3), (2, 3)])
    def test_basis_classes_have_unit_character(self, k, n):
        one = rat(ring(n).one())
        for lam in all_partitions(k, n):
            got = bethe.quantum_atiyah_bott(ModuleElement.basis(k, n, lam), 2)
            assert all(got.coefficient(d) == one for d in range(3))


class TestNewtonLadder:
    def test_each_step_doubles_the_verified_order(self):
        r = ring(2)
        system = bethe.bae_system(1, 2, 7)
        xs = [QSeries.const(7, r.eps(1), r.nv)]
        seen = []
        for _ in range(3):
            res, _ = system(xs)
            seen.append(bethe.residual_valuation(res))
            xs = bethe.newton_step(xs, system)
        assert seen == [1, 2, 4]

    def test_solved_system_reports_no_valuation(self):
        system = bethe.bae_system(1, 2, 7)
        xs = [QSeries.const(7, ring(2).eps(1), ring(2).nv)]
        for _ in range(3):
            xs = bethe.newton_step(xs, system)
        res, _ = system(xs)
        assert bethe.residual_valuation(res) is None


class TestRootCacheFiles:
    def test_path_layout(self):
        assert bethe.cache_path("base", 2, 5, 3) == \
            os.path.join("base", "5_2", "bethe_N3.json")

    def test_round_trip_restores_every_root(self):
        with tempfile.TemporaryDirectory() as d:
            bethe.save_roots(d, 1, 2, 2)
            fresh = {lam: bethe.solve_bae(lam, 2).roots
                     for lam in all_partitions(1, 2)}
            bethe.clear_caches()
            assert bethe.load_roots(d, 1, 2, 2) == 2
            for lam, roots in fresh.items():
                cached = bethe.solve_bae(lam, 2).roots
                assert all((a - b).is_zero()
                           for a, b in zip(roots, cached))

    def test_mismatched_document_is_rejected(self):
        with tempfile.TemporaryDirectory() as d:
            src = bethe.save_roots(d, 1, 2, 2)
            dst = bethe.cache_path(d, 1, 3, 2)
            os.makedirs(os.path.dirname(dst))
            shutil.copy(src, dst)
            with pytest.raises(ValueError):
                bethe.load_roots(d, 1, 3, 2)
