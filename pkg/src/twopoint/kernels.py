"""Piecewise Peano kernels of the two-point rule and their closed-form norms."""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise ValueError(f"interval needs finite a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def mid(self) -> float:
        return 0.5 * (self.a + self.b)


@dataclass(frozen=True)
class NodeTriple:
    y: float
    x: float
    z: float

    def check(self, iv: Interval) -> "NodeTriple":
        if not (iv.a <= self.y <= self.x <= self.z <= iv.b):
            raise ValueError(
                f"nodes must satisfy a <= y <= x <= z <= b, got y={self.y}, x={self.x}, "
                f"z={self.z} on [{iv.a}, {iv.b}]"
            )
        return self

    def gaps(self, iv: Interval) -> tuple[float, float, float, float]:
        """(y-a, x-y, z-x, b-z)."""
        return (self.y - iv.a, self.x - self.y, self.z - self.x, iv.b - self.z)

    def as_list(self) -> list[float]:
        return [self.y, self.x, self.z]


def gs_nodes(x: float, iv: Interval) -> NodeTriple:
    """Mirror-symmetric triple (x, midpoint, a+b-x)."""
    if not (iv.a <= x <= iv.mid):
        raise ValueError(f"x must lie in [a, (a+b)/2], got {x}")
    return NodeTriple(x, iv.mid, iv.a + iv.b - x)


# Sign applied to every kernel evaluation. Flipped only by ``tampered_kernel``,
# which exists so the verification suites can be shown to fail on a wrong kernel.
_KERNEL_SIGN = 1.0


@contextlib.contextmanager
def tampered_kernel():
    global _KERNEL_SIGN
    _KERNEL_SIGN = -1.0
    try:
        yield
    finally:
        _KERNEL_SIGN = 1.0


def _as_points(t, iv: Interval) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < iv.a) or np.any(arr > iv.b) or np.any(np.isnan(arr)):
        raise ValueError(f"t outside [{iv.a}, {iv.b}]")
    return arr


def eval_S(n: int, t, nodes: NodeTriple, iv: Interval):
    """S_n(t; y, x, z); the closed outer branches win at t = y and t = z."""
    if n < 0:
        raise ValueError("n must be >= 0")
    nodes.check(iv)
    tt = _as_points(t, iv)
    base = np.where(tt <= nodes.y, tt - iv.a, np.where(tt >= nodes.z, tt - iv.b, tt - nodes.x))
    out = _KERNEL_SIGN * base**n / math.factorial(n)
    return float(out) if np.ndim(out) == 0 else out


def eval_K(t, nodes: NodeTriple, iv: Interval):
    return eval_S(1, t, nodes, iv)


def eval_GS(t, x: float, iv: Interval):
    return eval_K(t, gs_nodes(x, iv), iv)


def moment_S(n: int, nodes: NodeTriple, iv: Interval) -> float:
    """Closed form of the integral of S_n over [a, b]."""
    g1, g2, g3, g4 = nodes.check(iv).gaps(iv)
    s = (-1) ** n
    return (g1 ** (n + 1) + g3 ** (n + 1) + s * g2 ** (n + 1) + s * g4 ** (n + 1)) / math.factorial(n + 1)


def abs_moment_S(n: int, nodes: NodeTriple, iv: Interval) -> float:
    gaps = nodes.check(iv).gaps(iv)
    return sum(g ** (n + 1) for g in gaps) / math.factorial(n + 1)


def q_moment_S(n: int, q: float, nodes: NodeTriple, iv: Interval) -> float:
    """Closed form of the integral of |S_n|**q."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    gaps = nodes.check(iv).gaps(iv)
    e = n * q + 1
    return sum(g**e for g in gaps) / (e * math.factorial(n) ** q)


def lq_norm_S(n: int, q: float, nodes: NodeTriple, iv: Interval) -> float:
    """||S_n||_q for q in [1, inf]."""
    if math.isinf(q):
        return sup_abs_S(n, nodes, iv)
    return q_moment_S(n, q, nodes, iv) ** (1.0 / q)


def sup_abs_K(nodes: NodeTriple, iv: Interval) -> float:
    nodes.check(iv)
    inner = 0.5 * (nodes.z - nodes.y) + abs(0.5 * (nodes.y + nodes.z) - nodes.x)
    return max(nodes.y - iv.a, inner, iv.b - nodes.z)


def sup_abs_S(n: int, nodes: NodeTriple, iv: Interval) -> float:
    return sup_abs_K(nodes, iv) ** n / math.factorial(n)
