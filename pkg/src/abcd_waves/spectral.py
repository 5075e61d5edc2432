"""Finite double Fourier series on the 2pi x 2pi torus with a fixed x-parity.

An ``EvenCos`` field is ``sum_{p>=0, q} c[p, q] cos(p x) exp(i q t)`` and an
``OddSin`` field is ``sum_{p>=1, q} c[p, q] sin(p x) exp(i q t)``.  Coefficients
live in a dense complex array ``data[p, q + Q]`` of shape ``(P + 1, 2Q + 1)``;
all sums are finite so every operation here is exact up to rounding.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, TextIO

import numpy as np
from scipy.signal import convolve2d

TWO_PI = 2.0 * math.pi


class Parity(str, enum.Enum):
    EVEN_COS = "EvenCos"
    ODD_SIN = "OddSin"

    def flipped(self) -> "Parity":
        return Parity.ODD_SIN if self is Parity.EVEN_COS else Parity.EVEN_COS

    def __mul__(self, other: "Parity") -> "Parity":  # type: ignore[override]
        return Parity.EVEN_COS if self is other else Parity.ODD_SIN


@dataclass(frozen=True, eq=False)
class FourierField:
    parity: Parity
    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=complex, copy=True)
        if arr.ndim != 2 or arr.shape[1] % 2 != 1:
            raise ValueError(f"coefficient array must have shape (P+1, 2Q+1), got {arr.shape}")
        parity = Parity(self.parity)
        if parity is Parity.ODD_SIN and np.any(arr[0] != 0):
            raise ValueError("OddSin fields cannot carry p = 0 modes")
        arr.flags.writeable = False
        object.__setattr__(self, "parity", parity)
        object.__setattr__(self, "data", arr)

    # -- construction -------------------------------------------------
    @classmethod
    def zeros(cls, parity: Parity, P: int = 0, Q: int = 0) -> "FourierField":
        return cls(parity, np.zeros((P + 1, 2 * Q + 1), dtype=complex))

    @classmethod
    def from_dict(cls, parity: Parity, coeffs: Mapping[tuple[int, int], complex]) -> "FourierField":
        if not coeffs:
            return cls.zeros(parity)
        P = max(p for p, _ in coeffs)
        Q = max(abs(q) for _, q in coeffs)
        arr = np.zeros((P + 1, 2 * Q + 1), dtype=complex)
        for (p, q), value in coeffs.items():
            if p < 0:
                raise ValueError(f"negative x-wavenumber {p}")
            arr[p, q + Q] += value
        return cls(parity, arr)

    @classmethod
    def mode(cls, parity: Parity, p: int, q: int, amplitude: complex = 1.0) -> "FourierField":
        return cls.from_dict(parity, {(p, q): amplitude})

    # -- shape bookkeeping ----------------------------------------------
    @property
    def P(self) -> int:
        return self.data.shape[0] - 1

    @property
    def Q(self) -> int:
        return (self.data.shape[1] - 1) // 2

    @property
    def p_index(self) -> np.ndarray:
        return np.arange(self.P + 1)

    @property
    def q_index(self) -> np.ndarray:
        return np.arange(-self.Q, self.Q + 1)

    def coeff(self, p: int, q: int) -> complex:
        if 0 <= p <= self.P and abs(q) <= self.Q:
            return complex(self.data[p, q + self.Q])
        return 0j

    def padded(self, P: int, Q: int) -> "FourierField":
        if P < self.P or Q < self.Q:
            raise ValueError("padding cannot shrink a field; use truncated()")
        arr = np.zeros((P + 1, 2 * Q + 1), dtype=complex)
        arr[: self.P + 1, Q - self.Q : Q + self.Q + 1] = self.data
        return FourierField(self.parity, arr)

    def truncated(self, P: int, Q: int) -> "FourierField":
        P0, Q0 = min(P, self.P), min(Q, self.Q)
        arr = self.data[: P0 + 1, self.Q - Q0 : self.Q + Q0 + 1]
        return FourierField(self.parity, arr).padded(P, Q)

    def trimmed(self, tol: float = 0.0) -> "FourierField":
        """Smallest-shape copy holding every coefficient with modulus above ``tol``."""
        mask = np.abs(self.data) > tol
        if not mask.any():
            return FourierField.zeros(self.parity)
        ps, qs = np.nonzero(mask)
        P = int(ps.max())
        Q = int(np.abs(qs - self.Q).max())
        return self.truncated(P, Q).padded(P, Q)

    def to_dict(self, tol: float = 0.0) -> dict[tuple[int, int], complex]:
        out = {}
        for p, j in zip(*np.nonzero(np.abs(self.data) > tol)):
            out[(int(p), int(j) - self.Q)] = complex(self.data[p, j])
        return out

    # -- algebra -----------------------------------------------------------
    def _aligned(self, other: "FourierField") -> tuple[np.ndarray, np.ndarray]:
        if self.parity is not other.parity:
            raise ValueError(f"cannot combine {self.parity.value} with {other.parity.value}")
        P, Q = max(self.P, other.P), max(self.Q, other.Q)
        return self.padded(P, Q).data, other.padded(P, Q).data

    def __add__(self, other: "FourierField") -> "FourierField":
        a, b = self._aligned(other)
        return FourierField(self.parity, a + b)

    def __sub__(self, other: "FourierField") -> "FourierField":
        a, b = self._aligned(other)
        return FourierField(self.parity, a - b)

    def __neg__(self) -> "FourierField":
        return FourierField(self.parity, -self.data)

    def __mul__(self, scalar: complex) -> "FourierField":
        if isinstance(scalar, FourierField):
            return multiply(self, scalar)
        return FourierField(self.parity, self.data * scalar)

    __rmul__ = __mul__

    def conj_reflect(self) -> "FourierField":
        """Coefficients of the complex conjugate function: c[p, q] -> conj(c[p, -q])."""
        return FourierField(self.parity, np.conj(self.data[:, ::-1]))

    def is_real(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.abs(self.data).max(initial=0.0)))
        return bool(np.all(np.abs(self.data - np.conj(self.data[:, ::-1])) <= tol * scale))

    def allclose(self, other: "FourierField", atol: float = 1e-12) -> bool:
        a, b = self._aligned(other)
        return bool(np.all(np.abs(a - b) <= atol))

    def max_abs(self) -> float:
        return float(np.abs(self.data).max(initial=0.0))

    def __repr__(self) -> str:
        return f"FourierField({self.parity.value}, P={self.P}, Q={self.Q}, nnz={len(self.to_dict())})"


def pi0(f: FourierField) -> FourierField:
    """x-average: keep the p = 0 row only."""
    if f.parity is Parity.ODD_SIN:
        return FourierField.zeros(Parity.ODD_SIN, f.P, f.Q)
    arr = np.zeros_like(f.data)
    arr[0] = f.data[0]
    return FourierField(f.parity, arr)


def remove_mean(f: FourierField) -> FourierField:
    """Apply (I - pi0)."""
    if f.parity is Parity.ODD_SIN:
        return f
    arr = f.data.copy()
    arr[0] = 0
    return FourierField(f.parity, arr)


def dx_inverse(f: FourierField) -> FourierField:
    """Zero-mean x-antiderivative of (I - pi0) f; parity flips."""
    p = f.p_index.astype(float)
    scale = np.zeros_like(p)
    scale[1:] = 1.0 / p[1:]
    arr = f.data * scale[:, None]
    arr[0] = 0
    if f.parity is Parity.ODD_SIN:
        # int sin(px) = -cos(px)/p
        arr = -arr
    return FourierField(f.parity.flipped(), arr)


def diff(f: FourierField, dx_order: int = 0, dt_order: int = 0) -> FourierField:
    if dx_order < 0 or dt_order < 0:
        raise ValueError("derivative orders must be nonnegative")
    arr = f.data.copy()
    parity = f.parity
    p = f.p_index.astype(float)[:, None]
    for _ in range(dx_order):
        # d/dx cos(px) = -p sin(px), d/dx sin(px) = p cos(px)
        arr = arr * (-p if parity is Parity.EVEN_COS else p)
        parity = parity.flipped()
    if parity is Parity.ODD_SIN:
        arr[0] = 0
    if dt_order:
        arr = arr * (1j * f.q_index.astype(float))[None, :] ** dt_order
    return FourierField(parity, arr)


def _to_exponential(f: FourierField) -> np.ndarray:
    """Rewrite in exp(i k x) exp(i q t) form, array indexed [k + P, q + Q]."""
    P = f.P
    E = np.zeros((2 * P + 1, f.data.shape[1]), dtype=complex)
    if f.parity is Parity.EVEN_COS:
        E[P] = f.data[0]
        E[P + 1 :] = f.data[1:] / 2
        E[:P] = f.data[1:][::-1] / 2
    else:
        E[P + 1 :] = f.data[1:] / 2j
        E[:P] = -f.data[1:][::-1] / 2j
    return E


def multiply(f: FourierField, g: FourierField) -> FourierField:
    """Exact product of two finite series; the support grows, nothing is truncated."""
    conv = convolve2d(_to_exponential(f), _to_exponential(g))
    P = f.P + g.P
    parity = f.parity * g.parity
    arr = np.zeros((P + 1, conv.shape[1]), dtype=complex)
    if parity is Parity.EVEN_COS:
        arr[0] = conv[P]
        arr[1:] = conv[P + 1 :] + conv[:P][::-1]
    else:
        arr[1:] = 1j * (conv[P + 1 :] - conv[:P][::-1])
    return FourierField(parity, arr)


def _x_weights(parity: Parity, P: int) -> np.ndarray:
    # int cos^2 = int sin^2 = pi for p >= 1, int 1 = 2 pi; times 2 pi from t
    w = np.full(P + 1, 2.0 * math.pi**2)
    w[0] = 4.0 * math.pi**2 if parity is Parity.EVEN_COS else 0.0
    return w


def field_inner(f: FourierField, g: FourierField) -> complex:
    """Hermitian L2 product over [-pi, pi]^2 (linear in f, antilinear in g)."""
    a, b = f._aligned(g)
    w = _x_weights(f.parity, a.shape[0] - 1)
    return complex(np.sum(w[:, None] * a * np.conj(b)))


def grid(nx: int, nt: int) -> tuple[np.ndarray, np.ndarray]:
    if nx < 1 or nt < 1:
        raise ValueError("grid sizes must be positive")
    x = -math.pi + TWO_PI * np.arange(nx) / nx
    t = -math.pi + TWO_PI * np.arange(nt) / nt
    return x, t


def evaluate_at(f: FourierField, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Complex values on the tensor grid ``x`` by ``t``; shape (len(x), len(t))."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    px = np.outer(x, f.p_index)
    basis = np.cos(px) if f.parity is Parity.EVEN_COS else np.sin(px)
    phases = np.exp(1j * np.outer(t, f.q_index))
    return basis @ f.data @ phases.T


def evaluate_on_grid(f: FourierField, nx: int, nt: int) -> np.ndarray:
    """Real values on x_j = -pi + 2 pi j / nx, t_m = -pi + 2 pi m / nt, indexed [j, m]."""
    if not f.is_real(1e-10):
        raise ValueError("field is not real; evaluate_at() returns complex values")
    x, t = grid(nx, nt)
    return evaluate_at(f, x, t).real


@dataclass(frozen=True, eq=False)
class FieldPair:
    """U = (eta, u) with eta even in x and u odd in x."""

    eta: FourierField
    u: FourierField

    def __post_init__(self):
        if self.eta.parity is not Parity.EVEN_COS or self.u.parity is not Parity.ODD_SIN:
            raise ValueError("FieldPair needs an EvenCos eta and an OddSin u")

    @classmethod
    def zeros(cls) -> "FieldPair":
        return cls(FourierField.zeros(Parity.EVEN_COS), FourierField.zeros(Parity.ODD_SIN))

    @classmethod
    def from_dicts(cls, eta: Mapping, u: Mapping) -> "FieldPair":
        return cls(FourierField.from_dict(Parity.EVEN_COS, eta), FourierField.from_dict(Parity.ODD_SIN, u))

    def map(self, fn) -> "FieldPair":
        return FieldPair(fn(self.eta), fn(self.u))

    def __add__(self, other: "FieldPair") -> "FieldPair":
        return FieldPair(self.eta + other.eta, self.u + other.u)

    def __sub__(self, other: "FieldPair") -> "FieldPair":
        return FieldPair(self.eta - other.eta, self.u - other.u)

    def __neg__(self) -> "FieldPair":
        return FieldPair(-self.eta, -self.u)

    def __mul__(self, scalar: complex) -> "FieldPair":
        return FieldPair(self.eta * scalar, self.u * scalar)

    __rmul__ = __mul__

    def is_real(self, tol: float = 1e-12) -> bool:
        return self.eta.is_real(tol) and self.u.is_real(tol)

    def in_zero_mean_subspace(self, tol: float = 0.0) -> bool:
        """eta has no x-average except possibly the constant (0, 0) mode."""
        row = self.eta.data[0].copy()
        row[self.eta.Q] = 0
        return bool(np.all(np.abs(row) <= tol))

    def allclose(self, other: "FieldPair", atol: float = 1e-12) -> bool:
        return self.eta.allclose(other.eta, atol) and self.u.allclose(other.u, atol)

    def max_abs(self) -> float:
        return max(self.eta.max_abs(), self.u.max_abs())

    def trimmed(self, tol: float = 0.0) -> "FieldPair":
        return FieldPair(self.eta.trimmed(tol), self.u.trimmed(tol))

    @property
    def shape(self) -> tuple[int, int]:
        return max(self.eta.P, self.u.P), max(self.eta.Q, self.u.Q)


def inner_product(F: FieldPair, G: FieldPair) -> complex:
    """<F, G> = integral of F1 conj(G1) + F2 conj(G2) over [-pi, pi]^2."""
    return field_inner(F.eta, G.eta) + field_inner(F.u, G.u)


def norm(F: FieldPair | FourierField) -> float:
    sq = field_inner(F, F) if isinstance(F, FourierField) else inner_product(F, F)
    return math.sqrt(max(sq.real, 0.0))


@dataclass(frozen=True)
class SobolevNorm:
    k: int
    value: float


def sobolev_norm(F: FieldPair | FourierField, k: int) -> SobolevNorm:
    """Coefficient-weighted norm: value^2 = sum (1 + p^2 + q^2)^k |c|^2."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    fields = (F.eta, F.u) if isinstance(F, FieldPair) else (F,)
    total = 0.0
    for f in fields:
        p = f.p_index[:, None].astype(float)
        q = f.q_index[None, :].astype(float)
        total += float(np.sum((1.0 + p**2 + q**2) ** k * np.abs(f.data) ** 2))
    return SobolevNorm(k, math.sqrt(total))


# -- coefficient CSV -----------------------------------------------------------
CSV_HEADER = ("parity", "p", "q", "re", "im")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_coefficients(fields: FieldPair | Iterable[FourierField], stream: TextIO, tol: float = 0.0) -> None:
    """Write rows ``parity,p,q,re,im`` for every coefficient above ``tol``."""
    if isinstance(fields, FieldPair):
        fields = (fields.eta, fields.u)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for f in fields:
        for (p, q), c in sorted(f.to_dict(tol).items()):
            writer.writerow((f.parity.value, p, q, _fmt(c.real), _fmt(c.imag)))


def coefficients_csv(fields: FieldPair | Iterable[FourierField], tol: float = 0.0) -> str:
    buf = io.StringIO()
    write_coefficients(fields, buf, tol)
    return buf.getvalue()


def read_coefficients(stream: TextIO) -> FieldPair:
    rows: dict[Parity, dict] = {Parity.EVEN_COS: {}, Parity.ODD_SIN: {}}
    reader = csv.reader(line for line in stream if not line.startswith("#"))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
        raise ValueError(f"expected header {','.join(CSV_HEADER)}")
    for row in reader:
        if not row:
            continue
        parity, p, q, re, im = row
        key = (int(p), int(q))
        bucket = rows[Parity(parity.strip())]
        bucket[key] = bucket.get(key, 0j) + complex(float(re), float(im))
    return FieldPair(
        FourierField.from_dict(Parity.EVEN_COS, rows[Parity.EVEN_COS]),
        FourierField.from_dict(Parity.ODD_SIN, rows[Parity.ODD_SIN]),
    )
