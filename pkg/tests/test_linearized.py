import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from abcd_waves.errors import CompatibilityViolation, ResonanceError
from abcd_waves.linearized import (
    LinearizedOperator,
    apply_L0,
    pseudo_inverse,
    q0_project,
    shift_phases,
    symmetry_S,
    symmetry_T,
)
from abcd_waves.resonance import ScaledParams, divisor_bound_bs
from abcd_waves.spectral import FieldPair, evaluate_at, grid, inner_product, norm

from conftest import random_pair

seeds = st.integers(0, 2**31 - 1)
taus = st.floats(-20, 20, allow_nan=False)


def _mode_matrix(p, q, sp):
    # (eta, u) coefficients -> (first, second) components at a single (p, q) mode
    a, b, g = sp.floats
    return np.array([[b * (1 + g * a * p * p), -1j * q * (1 + a * p * p) / p], [1j * q * (1 + a * p * p) / p, b]])


class TestBuild:
    def test_golden_kernel(self, golden_op):
        assert (golden_op.p0, golden_op.q0) == (1, 1)
        assert golden_op.s0 == pytest.approx(1.5)
        assert inner_product(golden_op.xi0, golden_op.xi0).real == pytest.approx(2 * math.pi**2 * (2 + 1.25))

    def test_requires_single_resonance(self):
        with pytest.raises(ResonanceError):
            LinearizedOperator.build(ScaledParams(1, 1, Fraction(1, 2)))
        with pytest.raises(ResonanceError):
            LinearizedOperator.build(ScaledParams(Fraction(11, 8), 2, Fraction(105, 352)))


class TestApply:
    def test_kernel_identities(self, golden_op):
        for k in golden_op.kernel:
            assert norm(apply_L0(k, golden_op.sp)) <= 1e-12

    def test_matches_mode_matrix(self, golden_sp):
        for p, q in [(1, 0), (2, 3), (3, -2)]:
            for col, U in enumerate(
                [FieldPair.from_dicts({(p, q): 1.0}, {}), FieldPair.from_dicts({}, {(p, q): 1.0})]
            ):
                out = apply_L0(U, golden_sp)
                M = _mode_matrix(p, q, golden_sp)
                assert out.eta.coeff(p, q) == pytest.approx(M[0, col], abs=1e-12)
                assert out.u.coeff(p, q) == pytest.approx(M[1, col], abs=1e-12)

    @given(seeds)
    def test_self_adjoint(self, seed):
        rng = np.random.default_rng(seed)
        sp = ScaledParams(5, 4, Fraction(1, 4))
        U, V = random_pair(rng, 4, 3, zero_mean=True), random_pair(rng, 4, 3, zero_mean=True)
        lhs = inner_product(apply_L0(U, sp), V)
        rhs = inner_product(U, apply_L0(V, sp))
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


class TestPseudoInverse:
    def test_roundtrip_random(self, golden_op, rng):
        for _ in range(20):
            F = random_pair(rng, 12, 12, zero_mean=True)
            QF = q0_project(F, golden_op)
            V = pseudo_inverse(QF, golden_op)
            assert norm(apply_L0(V, golden_op.sp) - QF) <= 1e-10 * norm(F)

    def test_output_orthogonal_to_kernel(self, golden_op, rng):
        F = q0_project(random_pair(rng, 6, 6, zero_mean=True), golden_op)
        V = pseudo_inverse(F, golden_op)
        for k in golden_op.kernel:
            assert abs(inner_product(V, k)) <= 1e-12 * norm(V)

    def test_incompatible_forcing(self, golden_op):
        with pytest.raises(CompatibilityViolation):
            pseudo_inverse(golden_op.xi0, golden_op)

    def test_rejects_mean_in_first_component(self, golden_op):
        with pytest.raises(ValueError, match="x-average"):
            pseudo_inverse(FieldPair.from_dicts({(0, 1): 1.0}, {}), golden_op)

    def test_projection_idempotent(self, golden_op, rng):
        F = random_pair(rng, 4, 4, zero_mean=True)
        once = q0_project(F, golden_op)
        assert q0_project(once, golden_op).allclose(once, 1e-12)

    def test_resonant_mode_solution(self, golden_op):
        # the range direction at (p0, q0) is (-i s, 1) up to scale
        s = golden_op.s0
        F = FieldPair.from_dicts({(1, 1): -1j * s}, {(1, 1): 1.0})
        V = pseudo_inverse(F, golden_op)
        assert apply_L0(V, golden_op.sp).allclose(F, 1e-12)

    def test_divisor_bound_controls_modes(self, golden_op, rng):
        M = divisor_bound_bs(golden_op.sp, 60, 60).M
        F = q0_project(random_pair(rng, 40, 40, zero_mean=True), golden_op)
        V = pseudo_inverse(F, golden_op)
        lhs = np.abs(V.eta.data) + np.abs(V.u.data)
        rhs = M * (np.abs(F.eta.data) + np.abs(F.u.data))
        assert np.all(lhs <= rhs + 1e-12)

    def test_p2_resonance(self):
        op = LinearizedOperator.build(ScaledParams(1, Fraction(5, 3), Fraction(5, 16)))
        for k in op.kernel:
            assert norm(apply_L0(k, op.sp)) <= 1e-12
        F = q0_project(FieldPair.from_dicts({(2, 1): 0.3, (1, 2): 1.0}, {(2, 1): 0.7j, (3, -1): 2.0}), op)
        assert norm(apply_L0(pseudo_inverse(F, op), op.sp) - F) <= 1e-12 * norm(F)


class TestSymmetry:
    def test_S_maps_xi0_to_conjugate(self, golden_op):
        assert symmetry_S(golden_op.xi0).allclose(golden_op.xi0_bar, 1e-15)
        assert symmetry_S(golden_op.zeta0).allclose(golden_op.zeta0, 0.0)

    def test_T_two_pi_is_identity(self, rng):
        U = random_pair(rng, 3, 5)
        out = symmetry_T(U, 2 * math.pi)
        assert np.array_equal(out.eta.data, U.eta.data) and np.array_equal(out.u.data, U.u.data)
        assert np.all(shift_phases(7, 2 * math.pi) == 1.0)

    def test_T_matches_pointwise_shift(self, rng):
        U = random_pair(rng, 2, 3)
        x, t = grid(8, 8)
        shifted = symmetry_T(U, 0.7)
        np.testing.assert_allclose(evaluate_at(shifted.eta, x, t), evaluate_at(U.eta, x, t + 0.7), atol=1e-12)

    @given(seeds, taus)
    def test_S_T_relation(self, seed, tau):
        U = random_pair(np.random.default_rng(seed), 3, 3)
        assert symmetry_S(symmetry_T(U, -tau)).allclose(symmetry_T(symmetry_S(U), tau), 1e-10)

    @given(seeds, taus)
    def test_L0_commutes_with_symmetries(self, seed, tau):
        sp = ScaledParams(5, 4, Fraction(1, 4))
        U = random_pair(np.random.default_rng(seed), 3, 3)
        L = apply_L0(U, sp)
        assert apply_L0(symmetry_S(U), sp).allclose(symmetry_S(L), 1e-10)
        assert apply_L0(symmetry_T(U, tau), sp).allclose(symmetry_T(L, tau), 1e-10)

    @given(seeds)
    def test_S_is_involution(self, seed):
        U = random_pair(np.random.default_rng(seed), 3, 3)
        assert symmetry_S(symmetry_S(U)).allclose(U, 0.0)
