import math
import numpy as np
import pytest
from hypothesis import given, strategies as st

from abcd_waves.bifurcation import BifParams, full_operator, standing_wave
from abcd_waves.spectral import FieldPair, FourierField, Parity, grid, inner_product, norm
from abcd_waves.verify import pde_residual, residual_fields, scaling_exponent

from conftest import random_pair


def _grid_values(f: FourierField, x, t, dx=0, dt=0):
    # d^k/dx^k cos(px) = p^k cos(px + k pi / 2), likewise for sin
    p = f.p_index.astype(float)
    q = f.q_index.astype(float)
    arg = np.outer(x, p) + dx * math.pi / 2
    basis = (np.cos(arg) if f.parity is Parity.EVEN_COS else np.sin(arg)) * p**dx
    phases = np.exp(1j * np.outer(t, q)) * (1j * q) ** dt
    return (basis @ f.data @ phases.T).real


def _grid_residual(U: FieldPair, a, b, g, nx, nt):
    x, t = grid(nx, nt)
    e = lambda dx=0, dt=0: _grid_values(U.eta, x, t, dx, dt)
    u = lambda dx=0, dt=0: _grid_values(U.u, x, t, dx, dt)
    r1 = e(0, 1) + b * u(1) - a * e(2, 1) + b * (u(1) * e() + u() * e(1))
    r2 = u(0, 1) + b * e(1) - g * a * b * e(3) - a * u(2, 1) + b * u() * u(1)
    return r1, r2


class TestResidual:
    def test_zero_fields(self):
        rep = pde_residual(FieldPair.zeros(), (5.0, 4.0, 0.25))
        assert rep.l2 == 0.0 and rep.linf == 0.0

    def test_trivial_family(self, golden_sp):
        rep = pde_residual(FieldPair.from_dicts({(0, 0): 0.37}, {}), (5.0, 4.0, 0.25))
        assert rep.l2 == 0.0

    def test_requires_params_for_bare_pair(self):
        with pytest.raises(ValueError):
            pde_residual(FieldPair.zeros())

    def test_rejects_complex_fields(self):
        with pytest.raises(ValueError, match="real"):
            pde_residual(FieldPair.from_dicts({(1, 1): 1.0}, {}), (1.0, 1.0, 0.5))

    @given(st.integers(0, 2**31 - 1))
    def test_two_route_oracle(self, seed):
        rng = np.random.default_rng(seed)
        U = random_pair(rng, 3, 3, real=True)
        a, b, g = 4.9, 3.9, 0.25
        r1, r2 = residual_fields(U, a, b, g)
        x, t = grid(32, 32)
        g1, g2 = _grid_residual(U, a, b, g, 32, 32)
        scale = max(np.abs(g1).max(), np.abs(g2).max())
        assert np.abs(_grid_values(r1, x, t) - g1).max() <= 1e-10 * scale
        assert np.abs(_grid_values(r2, x, t) - g2).max() <= 1e-10 * scale

    def test_norm_relation(self, golden_bp, golden_op):
        w = standing_wave(golden_bp, 2, op=golden_op)
        rep = pde_residual(w, nx=64, nt=64)
        assert 0 <= rep.l2 <= rep.linf * 2 * math.pi + 1e-12
        assert rep.l2 == pytest.approx(math.hypot(*rep.per_equation))
        assert rep.epsilon == pytest.approx(w.amplitude + 0.2)

    def test_grid_grows_to_avoid_aliasing(self, golden_bp, golden_op):
        rep = pde_residual(standing_wave(golden_bp, 3, op=golden_op), nx=4, nt=4)
        assert rep.grid[0] >= 14

    def test_coefficient_route_matches_parseval(self, golden_bp, golden_op):
        # on an alias-free grid the discrete L2 equals the exact L2 of the residual series
        w = standing_wave(golden_bp, 2, op=golden_op)
        r1, r2 = residual_fields(w.U, *golden_bp.perturbed())
        exact = math.sqrt(norm(r1) ** 2 + norm(r2) ** 2)
        assert pde_residual(w, nx=64, nt=64).l2 == pytest.approx(exact, rel=1e-12)


class TestKernelComponent:
    def test_order_two_residual_is_range_dominated(self, golden_bp, golden_op):
        ratios = []
        for k in range(3):
            bp = golden_bp.scaled(0.25**k)
            w = standing_wave(bp, 2, op=golden_op, beta2_source="inner_product")
            phi = full_operator(w.U, bp, golden_op)
            ratios.append(abs(inner_product(phi, golden_op.xi0)) / (norm(golden_op.xi0) * norm(phi)))
        assert ratios[-1] < 0.05
        assert ratios[2] < ratios[1] < ratios[0]


class TestScaling:
    @pytest.mark.parametrize("order, minimum", [(1, 1.7), (2, 2.7), (3, 3.6)])
    def test_slopes(self, golden_bp, order, minimum):
        res = scaling_exponent(golden_bp, halvings=5, order=order)
        assert res.slope >= minimum
        assert all(r2 < r1 for r1, r2 in zip(res.residuals, res.residuals[1:]))

    def test_order_four(self, golden_bp):
        assert scaling_exponent(golden_bp, halvings=3, order=4).slope >= 4.5

    def test_closed_form_beta2_limits_order_three(self, golden_bp):
        # with the closed-form cubic coefficient the kernel part of the residual stays cubic
        res = scaling_exponent(golden_bp, halvings=5, order=3, refine=False)
        local = math.log2(res.residuals[-2] / res.residuals[-1])
        assert local < 3.3
        fixed = scaling_exponent(golden_bp, halvings=5, order=3, refine=False, beta2_source="inner_product")
        assert math.log2(fixed.residuals[-2] / fixed.residuals[-1]) > 3.9

    def test_needs_a_halving(self, golden_bp):
        with pytest.raises(ValueError):
            scaling_exponent(golden_bp, halvings=0)
