"""Mode determinants, resonance sets and small-divisor bounds.

Every ``Delta = 0`` decision is made in exact rational arithmetic; floating
point is used only for the divisor-bound scans.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from numbers import Rational, Real
from typing import Literal

import numpy as np

from .errors import ResonanceError

log = logging.getLogger(__name__)

BRUTE_P_CAP = 10**4


def as_fraction(x) -> Fraction:
    """Exact rational from int, Fraction, Decimal, str or float (floats via their decimal repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational, Decimal)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, Real):
        if not math.isfinite(float(x)):
            raise ValueError(f"non-finite parameter {x!r}")
        return Fraction(repr(float(x)))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def rational_sqrt(r: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if it is irrational."""
    if r < 0:
        return None
    n, d = r.numerator, r.denominator
    sn, sd = math.isqrt(n), math.isqrt(d)
    if sn * sn == n and sd * sd == d:
        return Fraction(sn, sd)
    return None


def floor_sqrt(r: Fraction) -> int:
    """floor(sqrt(r)) for rational r >= 0, exactly."""
    return math.isqrt(r.numerator // r.denominator)


def is_integer(r: Fraction) -> bool:
    return r.denominator == 1


@dataclass(frozen=True)
class ScaledParams:
    """(alpha, beta, gamma) of the rescaled Bona-Smith system, kept as exact rationals."""

    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")

    @property
    def floats(self) -> tuple[float, float, float]:
        return float(self.alpha), float(self.beta), float(self.gamma)


@dataclass(frozen=True)
class GeneralDelta:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "alpha", "beta"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")


def delta_bs(p: int, q: int, sp: ScaledParams) -> Fraction:
    """q^2 (1 + alpha p^2)^2 - beta^2 p^2 (1 + gamma alpha p^2)."""
    a, b, g = sp.alpha, sp.beta, sp.gamma
    return q * q * (1 + a * p * p) ** 2 - b * b * p * p * (1 + g * a * p * p)


def delta_general(p: int, q: int, gd: GeneralDelta) -> Fraction:
    al, be = gd.alpha, gd.beta
    p2 = p * p
    return q * q * (1 + al * gd.b * p2) * (1 + al * gd.d * p2) - be * be * p2 * (al * gd.a * p2 - 1) * (al * gd.c * p2 - 1)


def quartic_coefficients(q: int, sp: ScaledParams) -> tuple[Fraction, Fraction, Fraction]:
    """(c4, c2, c0) with Delta(p, q) = c4 p^4 + c2 p^2 + c0."""
    a, b, g = sp.alpha, sp.beta, sp.gamma
    return a * a * q * q - g * a * b * b, 2 * a * q * q - b * b, Fraction(q * q)


def q_bound(sp: ScaledParams) -> int:
    """floor(beta sqrt(1 + alpha) / alpha): no resonant q exceeds it."""
    return floor_sqrt(sp.beta**2 * (1 + sp.alpha) / sp.alpha**2)


def _quadratic_rational_roots(c2: Fraction, c1: Fraction, c0: Fraction) -> list[Fraction]:
    """Rational roots of c2 s^2 + c1 s + c0 (empty when they are irrational or complex)."""
    if c2 == 0:
        return [] if c1 == 0 else [-c0 / c1]
    root = rational_sqrt(c1 * c1 - 4 * c2 * c0)
    if root is None:
        return []
    return sorted({(-c1 - root) / (2 * c2), (-c1 + root) / (2 * c2)})


@dataclass(frozen=True)
class ResonanceSet:
    elements: tuple[tuple[int, int], ...]
    complete_up_to: int
    certificates: tuple[Fraction, ...]
    method: str = "quartic"
    complete: bool = True

    def __contains__(self, pq) -> bool:
        return tuple(pq) in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def _brute_p_limit(q: int, sp: ScaledParams) -> int:
    # Cauchy bound on the roots s = p^2 of the quadratic in s
    c4, c2, c0 = quartic_coefficients(q, sp)
    if c4 != 0:
        bound = 1 + max(abs(c2), abs(c0)) / abs(c4)
    elif c2 != 0:
        bound = abs(c0 / c2) + 1
    else:
        return 0
    return floor_sqrt(bound) + 1


def enumerate_sigma(
    sp: ScaledParams, method: Literal["quartic", "brute"] = "quartic", p_cap: int = BRUTE_P_CAP
) -> ResonanceSet:
    """All (p, q) in N^2 with q (1 + alpha p^2) = beta p sqrt(1 + gamma alpha p^2)."""
    L = q_bound(sp)
    found: set[tuple[int, int]] = set()
    complete = True
    for q in range(1, L + 1):
        if method == "quartic":
            for s in _quadratic_rational_roots(*quartic_coefficients(q, sp)):
                if s > 0 and is_integer(s):
                    p = math.isqrt(int(s))
                    if p * p == s:
                        found.add((p, q))
        elif method == "brute":
            p_max = _brute_p_limit(q, sp)
            if p_max > p_cap:
                log.warning("brute scan for q=%d capped at p=%d (bound %d)", q, p_cap, p_max)
                p_max, complete = p_cap, False
            for p in range(1, p_max + 1):
                if delta_bs(p, q, sp) == 0:
                    found.add((p, q))
        else:
            raise ValueError(f"unknown method {method!r}")
    elements = tuple(sorted(found))
    certs = []
    for p, q in elements:
        c4, c2, c0 = quartic_coefficients(q, sp)
        cert = c4 * p**4 + c2 * p**2 + c0
        assert cert == 0 and delta_bs(p, q, sp) == 0
        certs.append(cert)
    return ResonanceSet(elements, L, tuple(certs), method, complete)


@dataclass
class UniquenessReport:
    p0q0: tuple[int, int]
    L: int
    condition_i_value: Fraction | None
    condition_i_pass: bool
    # per q != q0: exact rational roots of the quadratic in p^2 (if rational) and pass flag
    condition_ii: list[dict] = field(default_factory=list)

    @property
    def condition_ii_pass(self) -> bool:
        return all(row["pass"] for row in self.condition_ii)

    @property
    def unique(self) -> bool:
        return self.condition_i_pass and self.condition_ii_pass

    def as_dict(self) -> dict:
        return {
            "p0q0": list(self.p0q0),
            "L": self.L,
            "condition_i_value": None if self.condition_i_value is None else str(self.condition_i_value),
            "condition_i_pass": self.condition_i_pass,
            "condition_ii": self.condition_ii,
            "condition_ii_pass": self.condition_ii_pass,
            "unique": self.unique,
        }


def _printed_roots(q: int, sp: ScaledParams) -> list[complex]:
    # the literal root formula with (alpha q^2 - gamma alpha beta^2) inside the radical
    a, b, g = (float(v) for v in (sp.alpha, sp.beta, sp.gamma))
    disc = complex((2 * a * q * q - b * b) ** 2 - 4 * (a * q * q - g * a * b * b) * q * q)
    den = 2 * (a * a * q * q - g * a * b * b)
    if den == 0:
        return []
    r = disc**0.5
    return [(b * b - 2 * a * q * q + r) / den, (b * b - 2 * a * q * q - r) / den]


def uniqueness_certificate(sp: ScaledParams, p0q0: tuple[int, int]) -> UniquenessReport:
    """Check the two sufficient conditions for (p0, q0) being the only resonant pair."""
    p0, q0 = p0q0
    if p0 < 1 or q0 < 1 or delta_bs(p0, q0, sp) != 0:
        raise ResonanceError(f"{p0q0} is not in the resonance set")
    L = q_bound(sp)
    c4, _, c0 = quartic_coefficients(q0, sp)
    if c4 == 0:
        # quadratic in p^2 degenerates to linear: p0^2 is the only root
        value, ok = None, True
    else:
        value = c0 / (c4 * p0 * p0)
        ok = not is_integer(value)
    rows = []
    for q in range(1, L + 1):
        if q == q0:
            continue
        roots = _quadratic_rational_roots(*quartic_coefficients(q, sp))
        integer_roots = [r for r in roots if is_integer(r)]
        rows.append(
            {
                "q": q,
                "rational_roots_p2": [str(r) for r in roots],
                "printed_form_roots_p2": [[z.real, z.imag] for z in _printed_roots(q, sp)],
                "pass": not integer_roots,
            }
        )
    return UniquenessReport((p0, q0), L, value, ok, rows)


@dataclass(frozen=True)
class DivisorBound:
    M: float
    scanned: tuple[int, int]
    asymptote_per_q: dict[int, float]
    tail_bound: float
    scan_max: float
    excluded_q: tuple[int, ...] = ()
    bounded: bool = True


def divisor_arrays(sp: ScaledParams, P: int, Q: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (p, q, C, D) grids for 0 <= p <= P, -Q <= q <= Q; C, D are NaN where excluded."""
    a, b, g = sp.floats
    p = np.arange(P + 1, dtype=float)[:, None]
    q = np.arange(-Q, Q + 1, dtype=float)[None, :]
    m = 1 + a * p**2
    delta = q**2 * m**2 - b**2 * p**2 * (1 + g * a * p**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        C = (p * (b * p + g * a * b * p**3) + p * np.abs(q) * m) / np.abs(delta)
        D = (p * np.abs(q) * m + b * p**2) / np.abs(delta)
    mask = np.zeros(delta.shape, dtype=bool)
    mask[0, Q] = True
    sigma = enumerate_sigma(sp)
    for pr, qr in sigma:
        if pr <= P and qr <= Q:
            mask[pr, Q + qr] = mask[pr, Q - qr] = True
    for qe in _excluded_q(sp, Q):
        mask[:, Q + qe] = mask[:, Q - qe] = True
    C[mask] = np.nan
    D[mask] = np.nan
    return np.broadcast_to(p, C.shape), np.broadcast_to(q, C.shape), C, D


def _excluded_q(sp: ScaledParams, Q: int) -> list[int]:
    # alpha q^2 = gamma beta^2 makes the p -> infinity limit resonant
    r = rational_sqrt(sp.gamma * sp.beta**2 / sp.alpha)
    if r is not None and is_integer(r) and 0 < r <= Q:
        return [int(r)]
    return []


def divisor_bound_bs(sp: ScaledParams, P: int = 200, Q: int = 200) -> DivisorBound:
    """Numerical estimate of the constant bounding the pseudo-inverse mode quotients."""
    if P < 10 or Q < 10:
        raise ValueError("scan at least P, Q >= 10")
    a, b, g = sp.floats
    _, _, C, D = divisor_arrays(sp, P, Q)
    scan_max = float(np.nanmax(np.maximum(C, D)))
    excluded = tuple(_excluded_q(sp, max(Q, floor_sqrt(4 * sp.beta**2 / sp.alpha))))
    K = floor_sqrt(4 * sp.beta**2 / sp.alpha)
    asym = {}
    for q in range(0, K + 1):
        if q in excluded:
            continue
        asym[q] = b / abs(a * q * q - g * b * b)
    tail = 1.0 / (2.0 * b)
    envelope = max([tail, *asym.values()])
    M = max(scan_max, envelope)

    # late growth along p beyond the envelope is the signature of a small divisor
    bounded = True
    both = np.fmax(C, D)
    half = P // 2
    for j in range(both.shape[1]):
        end, mid = both[P, j], both[half, j]
        if np.isfinite(end) and np.isfinite(mid) and end > envelope and end > 1.5 * mid:
            bounded = False
            log.warning("divisor quotients still growing at p=%d, q=%d", P, j - Q)
            break
    return DivisorBound(M, (P, Q), asym, tail, scan_max, excluded, bounded)


def divisor_quantities_general(gd: GeneralDelta, p: int, q: int) -> tuple[float, float]:
    """The two mode quotients bounding |eta_pq| and |u_pq| for a general abcd system."""
    delta = delta_general(p, q, gd)
    if delta == 0:
        raise ZeroDivisionError(f"Delta({p}, {q}) = 0: resonant mode")
    al, be = gd.alpha, gd.beta
    p2 = p * p
    A = (p * abs(q * (1 + al * gd.d * p2)) + be * p2 * abs(1 - al * gd.c * p2)) / abs(delta)
    B = (be * p2 * abs(1 - al * gd.a * p2) + p * abs(q * (1 + al * gd.b * p2))) / abs(delta)
    return float(A), float(B)
