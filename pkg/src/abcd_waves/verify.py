"""PDE residuals of constructed waves and their order of accuracy."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bifurcation import BifParams, StandingWave, standing_wave
from .linearized import LinearizedOperator
from .spectral import FieldPair, FourierField, diff, evaluate_on_grid, multiply

DEFAULT_GRID = 256


@dataclass(frozen=True)
class ResidualReport:
    l2: float
    linf: float
    grid: tuple[int, int]
    per_equation: tuple[float, float]
    epsilon: float

    def as_dict(self) -> dict:
        return {
            "l2": self.l2,
            "linf": self.linf,
            "grid": list(self.grid),
            "per_equation": list(self.per_equation),
            "epsilon": self.epsilon,
        }


def residual_fields(U: FieldPair, alpha: float, beta: float, gamma: float) -> tuple[FourierField, FourierField]:
    """Exact coefficient-space residuals (R1, R2) of the rescaled system."""
    eta, u = U.eta, U.u
    r1 = (
        diff(eta, 0, 1)
        + diff(u, 1, 0) * beta
        - diff(eta, 2, 1) * alpha
        + diff(multiply(u, eta), 1, 0) * beta
    )
    r2 = (
        diff(u, 0, 1)
        + diff(eta, 1, 0) * beta
        - diff(eta, 3, 0) * (gamma * alpha * beta)
        - diff(u, 2, 1) * alpha
        + diff(multiply(u, u), 1, 0) * (beta / 2)
    )
    return r1, r2


def residual_norms(r1: FourierField, r2: FourierField, nx: int, nt: int) -> tuple[float, float, tuple[float, float]]:
    cell = (2 * math.pi / nx) * (2 * math.pi / nt)
    g1 = evaluate_on_grid(r1, nx, nt)
    g2 = evaluate_on_grid(r2, nx, nt)
    mag2 = g1**2 + g2**2
    l2 = math.sqrt(float(mag2.sum()) * cell)
    linf = math.sqrt(float(mag2.max(initial=0.0)))
    per = (math.sqrt(float((g1**2).sum()) * cell), math.sqrt(float((g2**2).sum()) * cell))
    return l2, linf, per


def _grid_size(n: int, support: int) -> int:
    # enough points to sample the residual support without aliasing
    return max(n, 2 * support + 2)


def pde_residual(
    w: StandingWave | FieldPair,
    params: tuple[float, float, float] | None = None,
    nx: int = DEFAULT_GRID,
    nt: int = DEFAULT_GRID,
    epsilon: float | None = None,
) -> ResidualReport:
    """Residual of the rescaled system at ``params`` (defaults to the wave's perturbed parameters)."""
    if isinstance(w, StandingWave):
        U = w.U
        params = params or w.params.perturbed()
        if epsilon is None:
            bp = w.params
            epsilon = w.amplitude + abs(bp.mu) + abs(bp.nu) + abs(bp.B)
    else:
        U = w
        if params is None:
            raise ValueError("parameters are required for a bare FieldPair")
    if not U.is_real(1e-10):
        raise ValueError("residuals are defined for real fields only")
    r1, r2 = residual_fields(U, *params)
    nx = _grid_size(nx, max(r1.P, r2.P))
    nt = _grid_size(nt, max(r1.Q, r2.Q))
    l2, linf, per = residual_norms(r1, r2, nx, nt)
    return ResidualReport(l2, linf, (nx, nt), per, float(epsilon or 0.0))


@dataclass(frozen=True)
class ScalingResult:
    slope: float
    path: tuple[float, ...]
    epsilons: tuple[float, ...]
    residuals: tuple[float, ...]
    order: int


def scaling_exponent(
    base: BifParams,
    halvings: int = 5,
    order: int = 2,
    nx: int = 64,
    nt: int = 64,
    **wave_kw,
) -> ScalingResult:
    """Least-squares slope of log residual against log s along (mu, nu, B) = s^2 (mu, nu, B)_base.

    Along this path |A| ~ s, so s is the clean smallness parameter; the
    epsilons of the individual reports are returned alongside.
    """
    if halvings < 1:
        raise ValueError("need at least one halving")
    op = LinearizedOperator.build(base.base)
    path, eps, res = [], [], []
    for k in range(halvings + 1):
        path.append(0.5**k)
        bp = base.scaled(0.25**k)
        w = standing_wave(bp, order, op=op, **wave_kw)
        rep = pde_residual(w, nx=nx, nt=nt)
        eps.append(rep.epsilon)
        res.append(rep.l2)
    slope = float(np.polyfit(np.log(path), np.log(res), 1)[0])
    return ScalingResult(slope, tuple(path), tuple(eps), tuple(res), order)
