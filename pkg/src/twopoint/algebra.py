"""Coefficient polynomials, harmonic (Appell) sequences and Beta/Gamma helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

TRIM_TOL = 1e-14


def _trim(coeffs: Sequence[float]) -> tuple[float, ...]:
    c = [float(v) for v in coeffs]
    while len(c) > 1 and abs(c[-1]) < TRIM_TOL:
        c.pop()
    return tuple(c) if c else (0.0,)


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial with coefficients in ascending degree."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        object.__setattr__(self, "coeffs", _trim(list(coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t):
        return poly_eval(self, t)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(npoly.polyadd(self.coeffs, other.coeffs))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(npoly.polymul(self.coeffs, other.coeffs))

    def integral(self, lo: float, hi: float) -> float:
        """Exact definite integral over [lo, hi]."""
        anti = poly_antidiff(self, 0.0)
        return float(anti(hi) - anti(lo))


def poly_eval(p: Polynomial, t):
    """Horner evaluation; ``t`` may be a scalar or an array."""
    acc = np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
    for c in reversed(p.coeffs):
        acc = acc * t + c
    return acc


def poly_diff(p: Polynomial) -> Polynomial:
    if p.degree == 0:
        return Polynomial([0.0])
    return Polynomial([k * c for k, c in enumerate(p.coeffs) if k > 0])


def poly_antidiff(p: Polynomial, c: float = 0.0) -> Polynomial:
    return Polynomial([c] + [v / (k + 1) for k, v in enumerate(p.coeffs)])


def poly_shift_power(alpha: float, k: int) -> Polynomial:
    """(t - alpha)**k / k! expanded in powers of t."""
    coeffs = [math.comb(k, j) * (-alpha) ** (k - j) / math.factorial(k) for j in range(k + 1)]
    return Polynomial(coeffs)


@dataclass(frozen=True)
class HarmonicSequence:
    """Q_0, ..., Q_m with Q_0 = 1 and Q_k' = Q_{k-1}."""

    polys: tuple[Polynomial, ...]

    def __post_init__(self):
        if not self.polys:
            raise ValueError("a harmonic sequence needs at least Q_0")
        q0 = self.polys[0]
        if q0.degree != 0 or abs(q0.coeffs[0] - 1.0) > 1e-12:
            raise ValueError("Q_0 must be the constant 1")
        for k in range(1, len(self.polys)):
            if not appell_link_ok(self.polys[k], self.polys[k - 1]):
                raise ValueError(f"Appell condition fails at k={k}")

    def __len__(self) -> int:
        return len(self.polys)

    def __getitem__(self, k: int) -> Polynomial:
        return self.polys[k]

    @property
    def order(self) -> int:
        return len(self.polys) - 1


def appell_link_ok(qk: Polynomial, qkm1: Polynomial, rtol: float = 1e-12) -> bool:
    d = poly_diff(qk).coeffs
    ref = qkm1.coeffs
    width = max(len(d), len(ref))
    d = np.pad(d, (0, width - len(d)))
    ref = np.pad(ref, (0, width - len(ref)))
    scale = max(1.0, float(np.max(np.abs(ref))))
    return bool(np.all(np.abs(d - ref) <= rtol * scale))


def shifted_monomial_sequence(alpha: float, m: int) -> HarmonicSequence:
    """Q_k(t) = (t - alpha)**k / k! for k = 0..m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return HarmonicSequence(tuple(poly_shift_power(alpha, k) for k in range(m + 1)))


def antiderivative_sequence(constants: Sequence[float]) -> HarmonicSequence:
    """Appell sequence built from 1 by antidifferentiating with the given constants."""
    polys = [Polynomial([1.0])]
    for c in constants:
        polys.append(poly_antidiff(polys[-1], c))
    return HarmonicSequence(tuple(polys))


def offset_appell_sequence(m: int) -> HarmonicSequence:
    """Non-monomial test sequence: the k-th integration constant is 1/(k+3)."""
    return antiderivative_sequence([1.0 / (k + 3) for k in range(1, m + 1)])


def beta(p: float, q: float) -> float:
    if p <= 0 or q <= 0:
        raise ValueError(f"beta needs positive arguments, got ({p}, {q})")
    return math.exp(math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q))


def gamma_ratio(r: float, n: int) -> float:
    """Gamma(1 + r) / Gamma(1 + n + r) for r in (0, 1], n >= 1."""
    if not (0 < r <= 1) or n < 1:
        raise ValueError(f"gamma_ratio needs r in (0,1] and n >= 1, got r={r}, n={n}")
    return math.exp(math.lgamma(1 + r) - math.lgamma(1 + n + r))
