"""Lyapunov-Schmidt construction of small standing waves near a simple resonance.

Notation: ``A`` is the complex kernel amplitude, ``B`` the eta average, and
``mu``, ``nu`` the offsets of (alpha, beta) from the resonant base point.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from scipy.optimize import bisect

from .errors import Beta2Zero, EquivarianceError, NoBifurcation, OrderUnsupported
from .linearized import LinearizedOperator, pseudo_inverse, q0_project, symmetry_T
from .resonance import ScaledParams
from .spectral import FieldPair, FourierField, Parity, diff, inner_product, multiply, remove_mean

log = logging.getLogger(__name__)

N_MAX = 4
BETA2_TOL = 1e-12
ROUTE_TOL = 1e-10
EQUIVARIANCE_TOL = 1e-10

Beta2Source = Literal["closed_form", "inner_product"]
AmplitudeFormula = Literal["direct", "swapped"]


class SmallnessWarning(UserWarning):
    """Perturbation parameters lie outside the configured smallness radius."""


@dataclass(frozen=True)
class BifParams:
    base: ScaledParams
    mu: float = 0.0
    nu: float = 0.0
    B: float = 0.0
    tau: float = 0.0
    smallness_radius: float = 0.3

    def __post_init__(self):
        for name in ("mu", "nu", "B", "tau", "smallness_radius"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)

    @property
    def smallness(self) -> float:
        return abs(self.mu) + abs(self.nu) + abs(self.B)

    @property
    def is_small(self) -> bool:
        return self.smallness <= self.smallness_radius

    def perturbed(self) -> tuple[float, float, float]:
        """(alpha0 + mu, beta0 + nu, gamma0) as floats."""
        a, b, g = self.base.floats
        return a + self.mu, b + self.nu, g

    def scaled(self, factor: float) -> "BifParams":
        return replace(self, mu=self.mu * factor, nu=self.nu * factor, B=self.B * factor)


# -- operators of the perturbed system ----------------------------------------------
def bilinear_N(U1: FieldPair, U2: FieldPair) -> FieldPair:
    """Symmetric N with 2 N(U1, U2) = ((I - pi0) u1 u2, u1 eta2 + u2 eta1)."""
    first = remove_mean(multiply(U1.u, U2.u)) * 0.5
    second = (multiply(U1.u, U2.eta) + multiply(U2.u, U1.eta)) * 0.5
    return FieldPair(first, second)


def op_J(U: FieldPair) -> FieldPair:
    return FieldPair(remove_mean(U.eta), U.u)


def op_Kxt(U: FieldPair) -> FieldPair:
    return FieldPair(diff(U.u, 1, 1), diff(U.eta, 1, 1))


def op_G(U: FieldPair) -> FieldPair:
    return FieldPair(diff(U.eta, 2, 0), FourierField.zeros(Parity.ODD_SIN))


def ops_JKG(U: FieldPair) -> tuple[FieldPair, FieldPair, FieldPair]:
    return op_J(U), op_Kxt(U), op_G(U)


def full_operator(U: FieldPair, bp: BifParams, op: LinearizedOperator) -> FieldPair:
    """Left side of the perturbed system written around the base point; zero on solutions."""
    a0, b0, g0 = bp.base.floats
    mu, nu = bp.mu, bp.nu
    J, K, G = ops_JKG(U)
    return (
        op.apply(U)
        + J * nu
        - K * mu
        - G * (g0 * (a0 * nu + b0 * mu + mu * nu))
        + bilinear_N(U, U) * (b0 + nu)
    )


def theta(op: LinearizedOperator, A: complex, B: float = 0.0) -> FieldPair:
    return op.xi0 * A + op.xi0_bar * np.conj(A) + op.zeta0 * B


# -- coefficients -------------------------------------------------------------------
@dataclass(frozen=True)
class BifCoefficients:
    alpha1: float
    beta1: float
    beta2: float
    h2_mu_coeff: float
    h2_nu_coeff: float
    h2_B_coeff: float
    beta2_inner: float
    p0: int
    q0: int

    @property
    def beta2_routes_agree(self) -> bool:
        return abs(self.beta2 - self.beta2_inner) <= ROUTE_TOL * max(1.0, abs(self.beta2))

    def beta2_from(self, source: Beta2Source) -> float:
        if source == "closed_form":
            return self.beta2
        if source == "inner_product":
            return self.beta2_inner
        raise ValueError(f"unknown beta2 source {source!r}")

    def as_dict(self) -> dict:
        return {
            "p0": self.p0,
            "q0": self.q0,
            "alpha1": self.alpha1,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "beta2_inner": self.beta2_inner,
            "beta2_routes_agree": self.beta2_routes_agree,
            "h2_mu_coeff": self.h2_mu_coeff,
            "h2_nu_coeff": self.h2_nu_coeff,
            "h2_B_coeff": self.h2_B_coeff,
        }


def closed_form_alpha1_beta1(op: LinearizedOperator) -> tuple[float, float]:
    a, b, g = op.sp.floats
    p, q, s = op.p0, op.q0, op.s0
    den = 4 * a * p * q * (2 - g + 5 * a * p**2 + 4 * g * a**2 * p**4)
    alpha1 = b * (1 + 3 * a * p**2) * s**3 / den
    beta1 = -b * (1 + 2 * a * p**2 + 3 * g * a * p**2 + 4 * g * a**2 * p**4) * s**2 / den
    return alpha1, beta1


def _q_part(U: FieldPair, q: int) -> FieldPair:
    """Keep only the exp(i q t) column."""

    def keep(f: FourierField) -> FourierField:
        return FourierField(f.parity, np.where(f.q_index[None, :] == q, f.data, 0))

    return U.map(keep)


def beta2_inner_product(op: LinearizedOperator) -> float:
    """beta2 from the cubic kernel projection of 2 beta0 N(V2, Theta) at A = 1."""
    b0 = op.sp.floats[1]
    v2 = -b0 * pseudo_inverse(q0_project(bilinear_N(theta(op, 1.0), theta(op, 1.0)), op), op)
    y20 = _q_part(v2, 0)
    y22 = _q_part(v2, 2 * op.q0)
    val = inner_product(bilinear_N(y20, op.xi0) * 2 + bilinear_N(y22, op.xi0_bar) * 2, op.xi0)
    return float((b0 / (2 * math.pi**2) * val).real)


def compute_coefficients(op: LinearizedOperator) -> BifCoefficients:
    a, b, g = op.sp.floats
    p, q, s = op.p0, op.q0, op.s0
    alpha1, beta1 = closed_form_alpha1_beta1(op)
    beta2 = b * (-(s**2) / 4 - beta1 * s + alpha1 * s**2 / 2)
    inner = beta2_inner_product(op)
    if abs(beta2) < BETA2_TOL:
        raise Beta2Zero(f"beta2 = {beta2:.3e}: the amplitude equation degenerates")
    coeffs = BifCoefficients(
        alpha1=alpha1,
        beta1=beta1,
        beta2=beta2,
        h2_mu_coeff=-(2 * p * q * s - g * b * p**2),
        h2_nu_coeff=2 + 2 * g * a * p**2,
        h2_B_coeff=b * s**2,
        beta2_inner=inner,
        p0=p,
        q0=q,
    )
    if not coeffs.beta2_routes_agree:
        log.warning("beta2 closed form %.10g differs from inner-product value %.10g", beta2, inner)
    return coeffs


def h2_linear_part(bp: BifParams, coeffs: BifCoefficients) -> float:
    """h2 / (2 pi^2 A): the brace in the amplitude equation."""
    return coeffs.h2_mu_coeff * bp.mu + coeffs.h2_nu_coeff * bp.nu + coeffs.h2_B_coeff * bp.B


def amplitude_squared(
    bp: BifParams,
    coeffs: BifCoefficients,
    formula: AmplitudeFormula = "direct",
    beta2_source: Beta2Source = "closed_form",
) -> float:
    beta2 = coeffs.beta2_from(beta2_source)
    if abs(beta2) < BETA2_TOL:
        raise Beta2Zero("beta2 vanishes")
    if formula == "direct":
        brace = h2_linear_part(bp, coeffs)
        value = -brace / beta2
    elif formula == "swapped":
        # mu and nu exchanged and the global sign flipped
        brace = coeffs.h2_mu_coeff * bp.nu + coeffs.h2_nu_coeff * bp.mu + coeffs.h2_B_coeff * bp.B
        value = brace / beta2
    else:
        raise ValueError(f"unknown amplitude formula {formula!r}")
    if value < 0:
        raise NoBifurcation(f"|A|^2 = {value:.6g} < 0: only the trivial family exists")
    return value


def amplitude(bp: BifParams, coeffs: BifCoefficients, **kw) -> float:
    return math.sqrt(amplitude_squared(bp, coeffs, **kw))


# -- second order --------------------------------------------------------------------
def second_order_V2(A: complex, bp: BifParams, op: LinearizedOperator) -> FieldPair:
    """V2 from a fresh pseudo-inverse of the projected second-order forcing."""
    _, b0, g0 = bp.base.floats
    a0 = bp.base.floats[0]
    th = theta(op, A, bp.B)
    _, K, G = ops_JKG(th)
    forcing = K * bp.mu + G * (g0 * (b0 * bp.mu + a0 * bp.nu)) - bilinear_N(th, th) * b0
    return pseudo_inverse(q0_project(forcing, op), op)


def second_order_V2_closed_form(A: complex, bp: BifParams, op: LinearizedOperator) -> FieldPair:
    """V2 assembled from the explicit mode formulas."""
    a0, b0, g0 = bp.base.floats
    p, q, s = op.p0, op.q0, op.s0
    mu, nu, B = bp.mu, bp.nu, bp.B
    Ab = np.conj(A)
    dn = q * (1 + a0 * p**2) * s + b0 * p
    k2 = 2 + g0 * a0 * p**2
    alpha1, beta1 = closed_form_alpha1_beta1(op)
    lin = (mu * g0 * a0 * p**4 * q - (g0 * b0 * mu + g0 * a0 * nu) * p**3 * s) / (dn * k2)
    eta = {
        (p, q): lin * s * A + b0 * p * s**2 / (dn * k2) * A * B,
        (p, -q): lin * s * Ab + b0 * p * s**2 / (dn * k2) * Ab * B,
        (2 * p, 0): abs(A) ** 2 * s**2 / (2 * (1 + 4 * g0 * a0 * p**2)),
        (2 * p, 2 * q): alpha1 * A**2,
        (2 * p, -2 * q): alpha1 * Ab**2,
    }
    u = {
        (p, q): 1j * lin * A + 1j * b0 * p * s / (dn * k2) * A * B,
        (p, -q): -1j * lin * Ab - 1j * b0 * p * s / (dn * k2) * Ab * B,
        (2 * p, 2 * q): 1j * beta1 * A**2,
        (2 * p, -2 * q): -1j * beta1 * Ab**2,
    }
    return FieldPair.from_dicts(eta, u)


def explicit_eta(x: np.ndarray, t: float, A_abs: float, bp: BifParams, op: LinearizedOperator) -> np.ndarray:
    """Second-order free surface at B = 0 and tau = 0 as an explicit trigonometric sum."""
    a0, b0, g0 = bp.base.floats
    p, q, s = op.p0, op.q0, op.s0
    mu, nu = bp.mu, bp.nu
    dn = q * (1 + a0 * p**2) * s + b0 * p
    k2 = 2 + g0 * a0 * p**2
    lin = (mu * (g0 * a0 * p**4 * q * s - g0 * b0 * p**3 * s**2) - nu * g0 * a0 * p**3 * s**2) / (dn * k2)
    alpha1, _ = closed_form_alpha1_beta1(op)
    cq, c2q = math.cos(q * t), math.cos(2 * q * t)
    x = np.asarray(x, dtype=float)
    return (
        2 * A_abs * cq * np.cos(p * x) * (1 + lin)
        + A_abs**2 * (s**2 / (2 * (1 + 4 * g0 * a0 * p**2)) + 2 * alpha1 * c2q) * np.cos(2 * p * x)
    )


# -- higher orders -------------------------------------------------------------------
@dataclass
class HigherOrder:
    A: complex
    V: dict[int, FieldPair]
    h: dict[int, complex]
    notes: list[str] = field(default_factory=list)

    def total(self, op: LinearizedOperator, B: float) -> FieldPair:
        U = theta(op, self.A, B)
        for k in sorted(self.V):
            U = U + self.V[k]
        return U

    def H(self) -> float:
        """Real part of sum_k h_k / (2 pi^2 A)."""
        if self.A == 0:
            return 0.0
        return float(sum(v / (2 * math.pi**2 * self.A) for v in self.h.values()).real)


def _forcing(k: int, W: dict[int, FieldPair], bp: BifParams, h4_theta: bool = False) -> FieldPair:
    a0, b0, g0 = bp.base.floats
    mu, nu = bp.mu, bp.nu
    zero = FieldPair.zeros()
    prev = W.get(k - 1, zero)
    prev2 = W.get(k - 2, zero)
    if h4_theta and k == 4:
        prev2 = W[1]
    J, K, G = ops_JKG(prev)
    R = J * nu - K * mu - G * (g0 * (b0 * mu + a0 * nu)) - op_G(prev2) * (g0 * mu * nu)
    for i in range(1, k):
        if k - i in W and i in W:
            R = R + bilinear_N(W[i], W[k - i]) * b0
    for i in range(1, k - 1):
        if k - 1 - i in W and i in W:
            R = R + bilinear_N(W[i], W[k - 1 - i]) * nu
    return R


def higher_order(
    bp: BifParams,
    n: int,
    op: LinearizedOperator,
    A: complex,
    max_order: int = N_MAX,
    check_equivariance: bool = True,
    h4_theta: bool = False,
) -> HigherOrder:
    """Corrections V_2..V_n and kernel projections h_2..h_{n+1} of the order-by-order forcing.

    ``h4_theta`` swaps the (mu nu G) term of h_4 from V_2 to Theta for comparison
    with the alternative reading of that term.
    """
    if n < 2 or n > max_order:
        raise OrderUnsupported(f"order {n} outside 2..{max_order}")
    W: dict[int, FieldPair] = {1: theta(op, A, bp.B)}
    h: dict[int, complex] = {}
    for k in range(2, n + 2):
        R = _forcing(k, W, bp, h4_theta=False)
        h[k] = inner_product(R, op.xi0)
        if h4_theta and k == 4:
            h[k] = inner_product(_forcing(k, W, bp, h4_theta=True), op.xi0)
        if k <= n:
            W[k] = -pseudo_inverse(q0_project(R, op), op)
    notes = []
    if h4_theta and n >= 3:
        notes.append("h4 evaluated with G(Theta) in the mu*nu term")
    result = HigherOrder(A, {k: W[k] for k in range(2, n + 1)}, h, notes)
    if check_equivariance and A != 0:
        _check_equivariance(result, bp, n, op, max_order, h4_theta)
    return result


def _check_equivariance(res: HigherOrder, bp, n, op, max_order, h4_theta) -> None:
    tau = 0.7371
    phase = np.exp(1j * op.q0 * tau)
    rotated = higher_order(bp, n, op, res.A * phase, max_order, check_equivariance=False, h4_theta=h4_theta)
    for k, v in res.h.items():
        err = abs(rotated.h[k] - phase * v)
        if err > EQUIVARIANCE_TOL * max(1.0, abs(v)):
            raise EquivarianceError(f"h_{k} breaks the time-shift law by {err:.3e}")
        ratio = v / res.A
        if abs(ratio.imag) > EQUIVARIANCE_TOL * max(1.0, abs(ratio)):
            raise EquivarianceError(f"h_{k} / A is not real (imag {ratio.imag:.3e})")


def refined_amplitude(
    bp: BifParams, n: int, op: LinearizedOperator, guess: float, max_order: int = N_MAX, xtol: float = 1e-12
) -> float:
    """|A| solving the truncated real amplitude equation, bracketed around ``guess``."""

    def H(a2: float) -> float:
        if a2 <= 0:
            return h2_linear_from_projection(bp, op)
        return higher_order(bp, n, op, math.sqrt(a2), max_order, check_equivariance=False).H()

    g2 = max(guess, 1e-300) ** 2
    grid = np.concatenate([g2 * np.geomspace(1.0, 1e-3, 12), g2 * np.geomspace(1.0, 16.0, 12)[1:]])
    grid = np.unique(grid)
    values = [H(a2) for a2 in grid]
    brackets = [(grid[i], grid[i + 1]) for i in range(len(grid) - 1) if np.sign(values[i]) != np.sign(values[i + 1])]
    if not brackets:
        raise NoBifurcation("truncated amplitude equation has no root near the leading-order value")
    lo, hi = min(brackets, key=lambda br: abs(math.log(math.sqrt(br[0] * br[1]) / g2)))
    root = bisect(H, lo, hi, xtol=xtol * g2, maxiter=200)
    return math.sqrt(root)


def h2_linear_from_projection(bp: BifParams, op: LinearizedOperator) -> float:
    """Limit of H as |A| -> 0, from the projections rather than the closed coefficients."""
    R = _forcing(2, {1: theta(op, 1.0, bp.B)}, bp)
    R_lin = R - bilinear_N(theta(op, 1.0, 0.0), theta(op, 1.0, 0.0)) * bp.base.floats[1]
    return float((inner_product(R_lin, op.xi0) / (2 * math.pi**2)).real)


# -- assembly ---------------------------------------------------------------------------
@dataclass(frozen=True)
class StandingWave:
    U: FieldPair
    order: int
    amplitude: float
    params: BifParams
    coefficients: BifCoefficients
    p0: int
    q0: int
    residual_norm: float | None = None
    notes: tuple[str, ...] = ()

    def with_residual(self, value: float) -> "StandingWave":
        return replace(self, residual_norm=value)


def standing_wave(
    bp: BifParams,
    order: int = 2,
    op: LinearizedOperator | None = None,
    coeffs: BifCoefficients | None = None,
    formula: AmplitudeFormula = "direct",
    beta2_source: Beta2Source = "closed_form",
    refine: bool | None = None,
    max_order: int = N_MAX,
    A: float | None = None,
) -> StandingWave:
    """Assemble Theta + V_2 + ... + V_order, shifted by tau.

    ``refine`` defaults to True for order >= 3, where the truncated amplitude
    equation is solved instead of its leading-order form.
    """
    if order < 1 or order > max_order:
        raise OrderUnsupported(f"order {order} outside 1..{max_order}")
    op = op or LinearizedOperator.build(bp.base)
    coeffs = coeffs or compute_coefficients(op)
    if not bp.is_small:
        warnings.warn(
            f"|mu| + |nu| + |B| = {bp.smallness:.3g} exceeds the smallness radius {bp.smallness_radius}",
            SmallnessWarning,
            stacklevel=2,
        )
    notes = []
    if A is None:
        A = amplitude(bp, coeffs, formula=formula, beta2_source=beta2_source)
        if refine is None:
            refine = order >= 3
        if refine and order >= 2 and A > 0:
            A = refined_amplitude(bp, order, op, A, max_order)
            notes.append(f"amplitude refined at order {order}")
    if A == 0:
        U = op.zeta0 * bp.B
    elif order == 1:
        U = theta(op, A, bp.B)
    else:
        U = higher_order(bp, order, op, A, max_order, check_equivariance=False).total(op, bp.B)
    U = symmetry_T(U, bp.tau)
    return StandingWave(U, order, float(A), bp, coeffs, op.p0, op.q0, notes=tuple(notes))
