"""Two-point Ostrowski expansion: rule value, derivative corrections and remainder.

Sign convention used throughout::

    rule_value = integral + correction_sum + remainder

so ``rule_value - correction_sum`` approximates the integral with error
``-remainder``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import oracle
from .kernels import Interval, NodeTriple, eval_S
from .testlib import TestFunction

IDENTITY_TOL = 1e-8


@dataclass(frozen=True)
class QuadratureResult:
    approx: float
    correction: float
    remainder: float
    reference: float
    identity_residual: float

    @property
    def ok(self) -> bool:
        return bool(self.identity_residual <= IDENTITY_TOL * (1 + abs(self.reference)))

    def to_dict(self) -> dict:
        return asdict(self)


def _need(f: TestFunction, order: int) -> None:
    if order > f.max_order:
        raise ValueError(f"{f.name} provides derivatives up to {f.max_order}, need {order}")


def reference_integral(f: TestFunction, iv: Interval) -> float:
    return oracle.integrate(lambda t: f.value_at(0, t), iv.a, iv.b).value


def rule_value(f: TestFunction, nodes: NodeTriple, iv: Interval) -> float:
    nodes.check(iv)
    return float((nodes.x - iv.a) * f.value_at(0, nodes.y) + (iv.b - nodes.x) * f.value_at(0, nodes.z))


def correction_sum(f: TestFunction, n: int, nodes: NodeTriple, iv: Interval) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    _need(f, n - 1)
    y, x, z = nodes.check(iv).as_list()
    total = 0.0
    for k in range(2, n + 1):
        left = ((y - iv.a) ** k - (y - x) ** k) * f.value_at(k - 1, y)
        right = ((z - x) ** k - (z - iv.b) ** k) * f.value_at(k - 1, z)
        total += (-1) ** k / math.factorial(k) * (left + right)
    return float(total)


def remainder_numeric(f: TestFunction, n: int, nodes: NodeTriple, iv: Interval) -> float:
    """(-1)^(n+1) times the oracle integral of S_n f^(n), split at the nodes."""
    _need(f, n)
    nodes.check(iv)
    val = oracle.integrate(
        lambda t: eval_S(n, t, nodes, iv) * f.value_at(n, t),
        iv.a, iv.b, breakpoints=nodes.as_list(),
    ).value
    return (-1) ** (n + 1) * val


def expand(f: TestFunction, n: int, nodes: NodeTriple, iv: Interval) -> QuadratureResult:
    rule = rule_value(f, nodes, iv)
    corr = correction_sum(f, n, nodes, iv)
    rem = remainder_numeric(f, n, nodes, iv)
    ref = reference_integral(f, iv)
    return QuadratureResult(
        approx=rule - corr,
        correction=corr,
        remainder=rem,
        reference=ref,
        identity_residual=abs(rule - (ref + corr + rem)),
    )


def generalized_taylor(f: TestFunction, n: int, y: float, x: float, z: float) -> float:
    """Right-hand side of the two-sided Taylor formula; equals f(z)."""
    if not y <= x <= z:
        raise ValueError("need y <= x <= z")
    _need(f, n + 1)
    total = float(f.value_at(0, y))
    for k in range(1, n + 1):
        total += ((x - y) ** k * f.value_at(k, y) - (x - z) ** k * f.value_at(k, z)) / math.factorial(k)
    tail = oracle.integrate(lambda t: (x - t) ** n * f.value_at(n + 1, t), y, z, breakpoints=(x,)).value
    return total + tail / math.factorial(n)


def mean_value_bracket(n: int, nodes: NodeTriple, iv: Interval) -> float:
    m = 2 * n
    return sum(g ** (m + 1) for g in nodes.check(iv).gaps(iv))


def mean_value_eta(f: TestFunction, n: int, nodes: NodeTriple, iv: Interval) -> float:
    """Implied value of f^(2n)(eta) from the order-2n remainder.

    The kernel S_{2n} is nonnegative, so the result is a weighted mean of f^(2n).
    """
    bracket = mean_value_bracket(n, nodes, iv)
    if bracket <= 0:
        raise ValueError("degenerate node configuration: all gaps vanish")
    rem = remainder_numeric(f, 2 * n, nodes, iv)
    return -rem * math.factorial(2 * n + 1) / bracket


def panel_nodes(pattern: NodeTriple, lo: float, hi: float) -> NodeTriple:
    h = hi - lo
    return NodeTriple(lo + pattern.y * h, lo + pattern.x * h, lo + pattern.z * h)


def composite_integrate(f: TestFunction, n: int, panels: int, node_pattern: NodeTriple,
                        iv: Interval) -> float:
    """Composite rule with corrections of order 2n on each panel.

    With order 2n the per-panel error is the order-2n remainder, so polynomials of
    degree <= 2n-1 are integrated exactly and the global error decays like h^(2n).
    """
    if panels < 1:
        raise ValueError("panels must be >= 1")
    node_pattern.check(Interval(0.0, 1.0))
    edges = np.linspace(iv.a, iv.b, panels + 1)
    parts = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sub = Interval(float(lo), float(hi))
        nodes = panel_nodes(node_pattern, sub.a, sub.b)
        # clamp against rounding so the mapped nodes stay admissible
        nodes = NodeTriple(*np.clip(nodes.as_list(), sub.a, sub.b))
        parts.append(rule_value(f, nodes, sub) - correction_sum(f, 2 * n, nodes, sub))
    return math.fsum(parts)
