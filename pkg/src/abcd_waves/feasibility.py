"""Feasible / Infeasible / Uncertain classification of well-posed abcd systems.

Verdicts come from exact degree and sign analysis of rational functions of p;
the numeric sequences attached to a verdict are evidence only.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .resonance import GeneralDelta, as_fraction, delta_general, divisor_quantities_general, floor_sqrt, rational_sqrt

ONE_THIRD = Fraction(1, 3)


class WellPosedClass(str, enum.Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    NONE = "none"


class Verdict(str, enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNCERTAIN = "Uncertain"
    NONE = "none"


@dataclass(frozen=True)
class ABCDParams:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    theta2: Fraction | None = None
    lam: Fraction | None = None
    mu: Fraction | None = None

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "theta2", "lam", "mu"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, as_fraction(value))
        prov = (self.theta2, self.lam, self.mu)
        if any(v is not None for v in prov):
            if any(v is None for v in prov):
                raise ValueError("provenance needs all of theta2, lambda, mu")
            if not 0 <= self.theta2 <= 1:
                raise ValueError("theta^2 must lie in [0, 1]")
            expected = _from_provenance(self.theta2, self.lam, self.mu)
            if expected != (self.a, self.b, self.c, self.d):
                raise ValueError("(a, b, c, d) disagree with the supplied (theta2, lambda, mu)")
            if self.a + self.b != (self.theta2 - ONE_THIRD) / 2 or self.c + self.d != (1 - self.theta2) / 2:
                raise AssertionError("provenance sum identities violated")

    @classmethod
    def from_provenance(cls, theta2, lam, mu) -> "ABCDParams":
        t, l, m = as_fraction(theta2), as_fraction(lam), as_fraction(mu)
        return cls(*_from_provenance(t, l, m), theta2=t, lam=l, mu=m)

    @classmethod
    def bona_smith(cls, mu) -> "ABCDParams":
        """Bona-Smith member: theta^2 = (4/3 - mu)/(2 - mu), lambda = 0, mu < 0."""
        m = as_fraction(mu)
        if m >= 0:
            raise ValueError("the Bona-Smith family needs mu < 0")
        return cls.from_provenance((Fraction(4, 3) - m) / (2 - m), 0, m)

    @property
    def coeffs(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return self.a, self.b, self.c, self.d

    def general_delta(self, alpha, beta) -> GeneralDelta:
        return GeneralDelta(self.a, self.b, self.c, self.d, alpha, beta)


def _from_provenance(t: Fraction, l: Fraction, m: Fraction) -> tuple[Fraction, ...]:
    ab = (t - ONE_THIRD) / 2
    cd = (1 - t) / 2
    return ab * l, ab * (1 - l), cd * m, cd * (1 - m)


def wellposedness_class(p: ABCDParams) -> WellPosedClass:
    a, b, c, d = p.coeffs
    if a <= 0 and c <= 0 and b >= 0 and d >= 0:
        return WellPosedClass.C1
    if a == c and a > 0 and b >= 0 and d >= 0:
        return WellPosedClass.C2
    if a == c and a > 0 and b == d and b < 0:
        return WellPosedClass.C3
    return WellPosedClass.NONE


# -- exact polynomials in p, stored as coefficient lists (index = degree) -------
Poly = list


def _pmul(f: Poly, g: Poly) -> Poly:
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        for j, y in enumerate(g):
            out[i + j] += x * y
    return out


def _padd(f: Poly, g: Poly) -> Poly:
    n = max(len(f), len(g))
    return [(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)]


def _pscale(f: Poly, k) -> Poly:
    return [k * x for x in f]


def _deg(f: Poly) -> int:
    for i in range(len(f) - 1, -1, -1):
        if f[i] != 0:
            return i
    return -1


def _lead(f: Poly) -> Fraction:
    return f[_deg(f)]


def _kernel_polys(p: ABCDParams, alpha: Fraction, beta: Fraction) -> tuple[Poly, Poly]:
    # q^2 (1 + a_b p^2)(1 + a_d p^2) = beta^2 p^2 (a_a p^2 - 1)(a_c p^2 - 1)
    a, b, c, d = p.coeffs
    num = _pscale(_pmul([0, 0, 1], _pmul([-1, 0, alpha * a], [-1, 0, alpha * c])), beta * beta)
    den = _pmul([1, 0, alpha * b], [1, 0, alpha * d])
    return num, den


@dataclass(frozen=True)
class KernelLimit:
    finite: bool
    limit: Fraction | None  # None means +infinity
    num_degree: int
    den_degree: int
    sequence: tuple[float, ...] = ()

    @property
    def label(self) -> str:
        return str(self.limit) if self.finite else "+inf"


def _require_wellposed(p: ABCDParams) -> WellPosedClass:
    cls = wellposedness_class(p)
    if cls is WellPosedClass.NONE:
        raise ValueError(f"{p.coeffs} is not in a well-posed class")
    return cls


def kernel_limit_test(p: ABCDParams, alpha=1, beta=1, P: int = 50) -> KernelLimit:
    """Does the resonant q^2(p) stay bounded as p grows?"""
    _require_wellposed(p)
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    num, den = _kernel_polys(p, alpha, beta)
    dn, dd = _deg(num), _deg(den)
    seq = []
    for k in range(1, P + 1):
        dv = sum(x * k**i for i, x in enumerate(den))
        nv = sum(x * k**i for i, x in enumerate(num))
        seq.append(float(nv / dv) if dv != 0 else math.inf)
    if dn > dd:
        return KernelLimit(False, None, dn, dd, tuple(seq))
    limit = _lead(num) / _lead(den) if dn == dd else Fraction(0)
    return KernelLimit(True, limit, dn, dd, tuple(seq))


@dataclass(frozen=True)
class DivisorLimit:
    bounded: bool
    witness: str | None  # "A" or "B": which quotient diverges
    witness_q: int | None
    witness_sequence: tuple[float, ...]
    degrees: dict  # {"delta": int, "A": int, "B": int} for generic q != 0
    exceptional_q: tuple[int, ...] = ()


def _nz(x) -> int:
    return int(x != 0)


def divisor_degrees(p: ABCDParams) -> dict[str, int]:
    """Degrees in p of Delta and of the A, B numerators for generic fixed q != 0."""
    a, b, c, d = p.coeffs
    return {
        "delta": max(2 * _nz(b) + 2 * _nz(d), 2 + 2 * _nz(a) + 2 * _nz(c)),
        "A": max(1 + 2 * _nz(d), 2 + 2 * _nz(c)),
        "B": max(2 + 2 * _nz(a), 1 + 2 * _nz(b)),
    }


def exceptional_q(p: ABCDParams, alpha: Fraction, beta: Fraction, Q: int) -> tuple[int, ...]:
    """Integers q where the leading coefficient of Delta(., q) cancels."""
    num, den = _kernel_polys(p, alpha, beta)
    if _deg(num) != _deg(den):
        return ()
    r = rational_sqrt(_lead(num) / _lead(den))
    if r is not None and r.denominator == 1 and 0 < r <= Q:
        return (int(r),)
    return ()


def _scan(p: ABCDParams, alpha, beta, q: int, P: int, which: str) -> tuple[float, ...]:
    gd = p.general_delta(alpha, beta)
    seq = []
    for k in range(1, P + 1):
        if delta_general(k, q, gd) == 0:
            seq.append(math.nan)
            continue
        A, B = divisor_quantities_general(gd, k, q)
        seq.append(A if which == "A" else B)
    return tuple(seq)


def divisor_limit_test(p: ABCDParams, alpha=1, beta=1, P: int = 200, Q: int = 20) -> DivisorLimit:
    _require_wellposed(p)
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    deg = divisor_degrees(p)
    exc = exceptional_q(p, alpha, beta, Q)
    for which in ("A", "B"):
        if deg[which] > deg["delta"]:
            return DivisorLimit(False, which, 1, _scan(p, alpha, beta, 1, P, which), deg, exc)
    q_probe = 1 if 1 not in exc else 2
    return DivisorLimit(True, None, None, _scan(p, alpha, beta, q_probe, min(P, 50), "A"), deg, exc)


@dataclass(frozen=True)
class FeasibilityVerdict:
    wellposed_class: WellPosedClass
    verdict: Verdict
    kernel_limit: KernelLimit | None
    divisor_bounded: str  # "yes" | "no" | "parameter-dependent"
    evidence: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        kl = self.kernel_limit
        return {
            "wellposed_class": self.wellposed_class.value,
            "verdict": self.verdict.value,
            "kernel_limit": None if kl is None else kl.label,
            "divisor_bounded": self.divisor_bounded,
            "evidence": self.evidence,
            "notes": list(self.notes),
        }


def _resonance_scan(p: ABCDParams, alpha: Fraction, beta: Fraction, P: int) -> dict:
    # exact scan of Delta = 0 for p <= P; q is pinned by q^2 = N(p)/D(p)
    num, den = _kernel_polys(p, alpha, beta)
    pairs = []
    for k in range(1, P + 1):
        dv = sum(x * k**i for i, x in enumerate(den))
        nv = sum(x * k**i for i, x in enumerate(num))
        if dv == 0 or nv / dv <= 0:
            continue
        r = rational_sqrt(nv / dv)
        if r is not None and r.denominator == 1:
            pairs.append((k, int(r)))
    return {"resonant_pairs": pairs, "scanned_p": P, "complete": False}


def classify(p: ABCDParams, alpha=None, beta=None, P: int = 50, Q: int = 20) -> FeasibilityVerdict:
    cls = wellposedness_class(p)
    if cls in (WellPosedClass.NONE, WellPosedClass.C3):
        note = "not well-posed" if cls is WellPosedClass.NONE else "C3: nonlinear well-posedness not settled"
        return FeasibilityVerdict(cls, Verdict.NONE, None, "no", {}, (note,))
    supplied = alpha is not None and beta is not None
    al = as_fraction(alpha) if supplied else Fraction(1)
    be = as_fraction(beta) if supplied else Fraction(1)
    notes = [] if supplied else ["evidence sampled at alpha = beta = 1"]
    kl = kernel_limit_test(p, al, be, P)
    dl = divisor_limit_test(p, al, be, max(P, 10), Q)
    evidence = {
        "kernel_q2": list(kl.sequence),
        "kernel_degrees": {"num": kl.num_degree, "den": kl.den_degree},
        "divisor_degrees": dl.degrees,
        "divisor_witness": dl.witness,
        "divisor_sequence": list(dl.witness_sequence),
    }
    if not dl.bounded:
        return FeasibilityVerdict(cls, Verdict.INFEASIBLE, kl, "no", evidence, tuple(notes))
    bounded = "yes"
    if supplied and dl.exceptional_q:
        bounded = "parameter-dependent"
        notes.append(f"leading coefficient of Delta cancels at q = {list(dl.exceptional_q)}")
    if not kl.finite:
        if supplied:
            evidence["resonance_scan"] = _resonance_scan(p, al, be, P)
        return FeasibilityVerdict(cls, Verdict.UNCERTAIN, kl, bounded, evidence, tuple(notes))
    if bounded != "yes":
        return FeasibilityVerdict(cls, Verdict.UNCERTAIN, kl, bounded, evidence, tuple(notes))
    return FeasibilityVerdict(cls, Verdict.FEASIBLE, kl, bounded, evidence, tuple(notes))


# -- sign-pattern sweep -----------------------------------------------------------
C1_SIGNS = {"a": (-1, 0), "b": (0, 1), "c": (-1, 0), "d": (0, 1)}


def _representative(signs: dict[str, int]) -> ABCDParams | None:
    """Parameters with the given signs and a + b + c + d = 1/3, equal positives (None if impossible)."""
    neg = [k for k, s in signs.items() if s < 0]
    pos = [k for k, s in signs.items() if s > 0]
    if not pos:
        return None
    share = (ONE_THIRD + Fraction(len(neg), 12)) / len(pos)
    vals = {k: (share if s > 0 else Fraction(-1, 12) if s < 0 else Fraction(0)) for k, s in signs.items()}
    return ABCDParams(vals["a"], vals["b"], vals["c"], vals["d"])


def sign_pattern_sweep() -> list[tuple[dict[str, int], FeasibilityVerdict]]:
    """Classify one representative of every admissible C1 and C2 sign pattern."""
    rows = []
    for sa, sb, sc, sd in itertools.product(C1_SIGNS["a"], C1_SIGNS["b"], C1_SIGNS["c"], C1_SIGNS["d"]):
        signs = {"a": sa, "b": sb, "c": sc, "d": sd}
        rep = _representative(signs)
        if rep is not None:
            rows.append((signs, classify(rep)))
    for sb, sd in itertools.product((0, 1), (0, 1)):
        signs = {"a": 1, "b": sb, "c": 1, "d": sd}
        rows.append((signs, classify(_representative(signs))))
    return rows


def sweep_counts() -> dict[str, int]:
    counts = {v.value: 0 for v in (Verdict.FEASIBLE, Verdict.INFEASIBLE, Verdict.UNCERTAIN)}
    for _, verdict in sign_pattern_sweep():
        counts[verdict.verdict.value] += 1
    return counts
