"""Linearization of the rescaled Bona-Smith system at the trivial state.

``apply_L0`` is assembled from the spectral primitives, while ``pseudo_inverse``
uses closed modewise formulas; the two are independent routes, and the
round-trip tests compare them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CompatibilityViolation, ResonanceError
from .resonance import ResonanceSet, ScaledParams, enumerate_sigma
from .spectral import FieldPair, FourierField, Parity, diff, dx_inverse, inner_product, norm, remove_mean

COMPAT_TOL = 1e-10


def apply_L0(U: FieldPair, sp: ScaledParams) -> FieldPair:
    a, b, g = sp.floats
    eta, u = U.eta, U.u
    first = (
        dx_inverse(diff(u, dt_order=1))
        + remove_mean(eta) * b
        - remove_mean(diff(eta, dx_order=2)) * (g * a * b)
        - remove_mean(diff(u, dx_order=1, dt_order=1)) * a
    )
    second = dx_inverse(diff(eta, dt_order=1)) + u * b - diff(eta, dx_order=1, dt_order=1) * a
    return FieldPair(first, second)


@dataclass(frozen=True, eq=False)
class LinearizedOperator:
    """L0 at parameters with a single resonant pair (p0, q0), plus its kernel."""

    sp: ScaledParams
    sigma: ResonanceSet

    @classmethod
    def build(cls, sp: ScaledParams) -> "LinearizedOperator":
        sigma = enumerate_sigma(sp)
        if len(sigma) != 1:
            raise ResonanceError(f"need exactly one resonant pair, found {list(sigma)}")
        return cls(sp, sigma)

    @property
    def p0(self) -> int:
        return self.sigma.elements[0][0]

    @property
    def q0(self) -> int:
        return self.sigma.elements[0][1]

    @cached_property
    def s0(self) -> float:
        """sqrt(1 + gamma alpha p0^2)."""
        a, _, g = self.sp.floats
        return math.sqrt(1.0 + g * a * self.p0**2)

    @cached_property
    def xi0(self) -> FieldPair:
        p, q = self.p0, self.q0
        return FieldPair.from_dicts({(p, q): 1.0}, {(p, q): -1j * self.s0})

    @cached_property
    def xi0_bar(self) -> FieldPair:
        p, q = self.p0, self.q0
        return FieldPair.from_dicts({(p, -q): 1.0}, {(p, -q): 1j * self.s0})

    @cached_property
    def zeta0(self) -> FieldPair:
        return FieldPair.from_dicts({(0, 0): 1.0}, {})

    @property
    def kernel(self) -> tuple[FieldPair, FieldPair, FieldPair]:
        return self.xi0, self.xi0_bar, self.zeta0

    def apply(self, U: FieldPair) -> FieldPair:
        return apply_L0(U, self.sp)

    def project(self, F: FieldPair) -> FieldPair:
        return q0_project(F, self)

    def solve(self, F: FieldPair, check: bool = True) -> FieldPair:
        return pseudo_inverse(F, self, check=check)


def q0_project(F: FieldPair, op: LinearizedOperator) -> FieldPair:
    """Remove the xi0 and conj(xi0) components."""
    out = F
    for k in (op.xi0, op.xi0_bar):
        out = out - k * (inner_product(F, k) / inner_product(k, k))
    return out


def check_compatibility(F: FieldPair, op: LinearizedOperator, tol: float = COMPAT_TOL) -> None:
    nF = norm(F)
    if nF == 0.0:
        return
    for k in (op.xi0, op.xi0_bar):
        ratio = abs(inner_product(F, k)) / (norm(k) * nF)
        if ratio > tol:
            raise CompatibilityViolation(f"|<F, xi>| / (|xi| |F|) = {ratio:.3e} exceeds {tol:g}")


def pseudo_inverse(F: FieldPair, op: LinearizedOperator, check: bool = True) -> FieldPair:
    """Modewise solution V of L0 V = F, orthogonal to the kernel."""
    if check:
        check_compatibility(F, op)
    P = max(F.eta.P, F.u.P, 1)
    Q = max(F.eta.Q, F.u.Q)
    g_t = F.eta.padded(P, Q).data
    f = F.u.padded(P, Q).data
    scale = max(1.0, float(np.abs(g_t).max(initial=0.0)))
    if np.any(np.abs(g_t[0]) > 1e-12 * scale):
        raise ValueError("first component must have zero x-average")
    a, b, g = op.sp.floats
    p = np.arange(P + 1, dtype=float)[:, None]
    q = np.arange(-Q, Q + 1, dtype=float)[None, :]
    m = 1.0 + a * p**2
    delta = q**2 * m**2 - b**2 * p**2 * (1.0 + g * a * p**2)
    resonant = (p == op.p0) & (np.abs(q) == op.q0)
    active = (p >= 1) & ~resonant
    with np.errstate(divide="ignore", invalid="ignore"):
        eta = np.where(active, -p * (1j * q * m * f + b * p * g_t) / delta, 0.0)
        u = np.where(active, -p * ((b * p + g * a * b * p**3) * f - 1j * q * m * g_t) / delta, 0.0)
    # resonant modes: the free kernel constant is fixed to zero
    s = op.s0
    denom = op.q0 * (1.0 + a * op.p0**2) * s + b * op.p0
    for sgn in (1, -1):
        j = Q + sgn * op.q0
        if op.p0 <= P and 0 <= j <= 2 * Q:
            fr = f[op.p0, j]
            eta[op.p0, j] = -sgn * 1j * s * op.p0 * fr / denom
            u[op.p0, j] = op.p0 * fr / denom
    return FieldPair(FourierField(Parity.EVEN_COS, eta), FourierField(Parity.ODD_SIN, u))


def symmetry_S(U: FieldPair) -> FieldPair:
    """Reflection acting on the (cos, sin) representation: t -> -t with u -> -u."""
    return FieldPair(
        FourierField(Parity.EVEN_COS, U.eta.data[:, ::-1]),
        FourierField(Parity.ODD_SIN, -U.u.data[:, ::-1]),
    )


def shift_phases(Q: int, tau: float) -> np.ndarray:
    """exp(i q tau) for q = -Q..Q, reduced so that tau = 2 pi k gives exactly 1."""
    q = np.arange(-Q, Q + 1, dtype=float)
    turns = q * (tau / (2.0 * math.pi))
    frac = turns - np.round(turns)
    return np.exp(2j * math.pi * frac)


def symmetry_T(U: FieldPair, tau: float) -> FieldPair:
    """Time shift (T_tau U)(x, t) = U(x, t + tau)."""
    return U.map(lambda f: FourierField(f.parity, f.data * shift_phases(f.Q, tau)[None, :]))
