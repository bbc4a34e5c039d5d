"""Fink-type representation of the two-point rule for an arbitrary Appell sequence."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import oracle
from .algebra import HarmonicSequence, shifted_monomial_sequence
from .kernels import Interval, NodeTriple, eval_K, gs_nodes
from .quadrature import reference_integral
from .testlib import TestFunction


@dataclass(frozen=True)
class FinkContext:
    seq: HarmonicSequence
    n: int
    nodes: NodeTriple
    iv: Interval

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if len(self.seq) < self.n:
            raise ValueError(f"sequence has {len(self.seq)} terms, order {self.n} needs Q_0..Q_{self.n - 1}")
        self.nodes.check(self.iv)


def monomial_context(alpha: float, n: int, nodes: NodeTriple, iv: Interval, extra: int = 0) -> FinkContext:
    return FinkContext(shifted_monomial_sequence(alpha, n - 1 + extra), n, nodes, iv)


def _check_k(ctx: FinkContext, k: int) -> None:
    if not 1 <= k <= ctx.n - 1:
        raise ValueError(f"k must lie in 1..{ctx.n - 1}, got {k}")


def T_k(ctx: FinkContext, f: TestFunction, k: int) -> float:
    _check_k(ctx, k)
    iv, (y, x, z), q = ctx.iv, ctx.nodes.as_list(), ctx.seq[k]
    val = (x - iv.a) * q(y) * f.value_at(k, y) + (iv.b - x) * q(z) * f.value_at(k, z)
    return float((-1) ** k * val / iv.length)


def F_k(ctx: FinkContext, f: TestFunction, k: int) -> float:
    _check_k(ctx, k)
    return _F(ctx.seq, ctx.n, k, f, ctx.iv.a, ctx.iv.b)


def _F(seq: HarmonicSequence, n: int, k: int, f: TestFunction, lo: float, hi: float) -> float:
    q = seq[k]
    val = q(lo) * f.value_at(k - 1, lo) - q(hi) * f.value_at(k - 1, hi)
    return float((-1) ** k * (n - k) * val / (hi - lo))


def F_weight_residual(ctx: FinkContext, f: TestFunction, k: int) -> float:
    """|(x-a)F_k(a,x) + (b-x)F_k(x,b) - (b-a)F_k(a,b)| for a < x < b."""
    _check_k(ctx, k)
    a, b, x = ctx.iv.a, ctx.iv.b, ctx.nodes.x
    if not a < x < b:
        raise ValueError("weight identity needs a < x < b")
    lhs = (x - a) * _F(ctx.seq, ctx.n, k, f, a, x) + (b - x) * _F(ctx.seq, ctx.n, k, f, x, b)
    return abs(lhs - (b - a) * _F(ctx.seq, ctx.n, k, f, a, b))


def _bracket(ctx: FinkContext, f: TestFunction) -> float:
    """(x-a)f(y) + (b-x)f(z) over (b-a), plus the T_k and F_k sums."""
    iv, (y, x, z) = ctx.iv, ctx.nodes.as_list()
    total = ((x - iv.a) * f.value_at(0, y) + (iv.b - x) * f.value_at(0, z)) / iv.length
    for k in range(1, ctx.n):
        total += T_k(ctx, f, k) + F_k(ctx, f, k)
    return float(total)


def _kernel_integral(ctx: FinkContext, f: TestFunction) -> float:
    """Oracle integral of Q_{n-1} K f^(n), split at y and z."""
    q, iv, nodes, n = ctx.seq[ctx.n - 1], ctx.iv, ctx.nodes, ctx.n
    return oracle.integrate(
        lambda t: q(t) * eval_K(t, nodes, iv) * f.value_at(n, t),
        iv.a, iv.b, breakpoints=(nodes.y, nodes.z),
    ).value


def fink_lhs(ctx: FinkContext, f: TestFunction, reference: float | None = None) -> float:
    if reference is None:
        reference = reference_integral(f, ctx.iv)
    return _bracket(ctx, f) / ctx.n - reference / ctx.iv.length


def fink_rhs(ctx: FinkContext, f: TestFunction) -> float:
    n = ctx.n
    return (-1) ** (n - 1) / (n * ctx.iv.length) * _kernel_integral(ctx, f)


def fink_residual(ctx: FinkContext, f: TestFunction) -> tuple[float, float]:
    """(|lhs - rhs|, |mean of f|); callers scale the tolerance by 1 + |mean|."""
    ref = reference_integral(f, ctx.iv)
    return abs(fink_lhs(ctx, f, ref) - fink_rhs(ctx, f)), abs(ref / ctx.iv.length)


def fink_quadrature(ctx: FinkContext, f: TestFunction) -> tuple[float, float]:
    """(G, E) with integral = G + E; E comes from the oracle kernel integral."""
    n = ctx.n
    G = ctx.iv.length * _bracket(ctx, f) / n
    E = (-1) ** n / n * _kernel_integral(ctx, f)
    return G, E


def symmetric_T_k(ctx: FinkContext, f: TestFunction, k: int) -> float:
    """Single-Q_k form of T_k at nodes (h, mid, a+b-h); valid when Q_k(a+b-t) = (-1)^k Q_k(t)."""
    _check_k(ctx, k)
    h = ctx.nodes.y
    if not gs_nodes(h, ctx.iv) == ctx.nodes:
        raise ValueError("nodes must be (h, (a+b)/2, a+b-h)")
    fk = f.value_at(k, h) + (-1) ** k * f.value_at(k, ctx.iv.a + ctx.iv.b - h)
    return float((-1) ** k / 2 * ctx.seq[k](h) * fk)


# --- shifted-monomial expansion and its symmetric (companion) specialisation ---

def expansion_tilde_terms(alpha: float, nodes: NodeTriple, k: int, n: int, f: TestFunction,
                          iv: Interval) -> tuple[float, float]:
    """Closed-form T~_k and F~_k for Q_k(t) = (t - alpha)^k / k!."""
    y, x, z = nodes.as_list()
    a, b, fk = iv.a, iv.b, math.factorial(k)
    T = ((x - a) * (alpha - y) ** k * f.value_at(k, y)
         + (-1) ** k * (b - x) * (z - alpha) ** k * f.value_at(k, z)) / (iv.length * fk)
    F = (n - k) / (iv.length * fk) * ((alpha - a) ** k * f.value_at(k - 1, a)
                                     + (-1) ** (k + 1) * (b - alpha) ** k * f.value_at(k - 1, b))
    return float(T), float(F)


def expansion_residual(alpha: float, nodes: NodeTriple, n: int, f: TestFunction, iv: Interval) -> float:
    """Residual of the shifted-monomial expansion written with T~_k, F~_k and (alpha - t)^(n-1)."""
    nodes.check(iv)
    y, x, z = nodes.as_list()
    total = ((x - iv.a) * f.value_at(0, y) + (iv.b - x) * f.value_at(0, z)) / iv.length
    for k in range(1, n):
        T, F = expansion_tilde_terms(alpha, nodes, k, n, f, iv)
        total += T + F
    ref = reference_integral(f, iv)
    lhs = total / n - ref / iv.length
    rhs = oracle.integrate(
        lambda t: (alpha - t) ** (n - 1) * eval_K(t, nodes, iv) * f.value_at(n, t),
        iv.a, iv.b, breakpoints=(y, z),
    ).value / (math.factorial(n) * iv.length)
    return abs(lhs - rhs)


def milovanovic_pecaric_parts(x: float, n: int, f: TestFunction, iv: Interval) -> dict[str, float]:
    """Collapse y = x = z = alpha; residuals of the expansion form and of the general identity."""
    nodes = NodeTriple(x, x, x).check(iv)
    return {
        "expansion": expansion_residual(x, nodes, n, f, iv),
        "general": fink_residual(monomial_context(x, n, nodes, iv), f)[0],
    }


def milovanovic_pecaric_residual(x: float, n: int, f: TestFunction, iv: Interval) -> float:
    return max(milovanovic_pecaric_parts(x, n, f, iv).values())


def gs_G_k(x: float, k: int, n: int, f: TestFunction, iv: Interval) -> float:
    """Companion-rule coefficient G_k(x) in its closed printed form."""
    a, b, mid = iv.a, iv.b, iv.mid
    if not a <= x <= mid:
        raise ValueError(f"x must lie in [a, (a+b)/2], got {x}")
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in 1..{n - 1}, got {k}")
    first = (x - a) ** k * (f.value_at(k - 1, a) + (-1) ** (k + 1) * f.value_at(k - 1, b))
    second = (1 + (-1) ** (k + 1)) * (mid - x) ** k * f.value_at(k - 1, mid)
    return float((n - k) / (math.factorial(k) * iv.length) * (first + second))


def gs_G_k_derived(x: float, k: int, n: int, f: TestFunction, iv: Interval) -> float:
    """T_k + F_k of the general identity at nodes (x, mid, a+b-x) with Q_k = (t-x)^k/k!."""
    ctx = monomial_context(x, n, gs_nodes(x, iv), iv)
    return T_k(ctx, f, k) + F_k(ctx, f, k)


def gs_kernel_integral(x: float, n: int, f: TestFunction, iv: Interval) -> float:
    """(1/(n!(b-a))) times the integral of (x-t)^(n-1) S(t,x) f^(n)(t)."""
    nodes = gs_nodes(x, iv)
    val = oracle.integrate(
        lambda t: (x - t) ** (n - 1) * eval_K(t, nodes, iv) * f.value_at(n, t),
        iv.a, iv.b, breakpoints=(nodes.y, nodes.z),
    ).value
    return val / (math.factorial(n) * iv.length)


def gs_lhs(x: float, n: int, f: TestFunction, iv: Interval, form: str = "printed",
           reference: float | None = None) -> float:
    coeff = {"printed": gs_G_k, "derived": gs_G_k_derived}.get(form)
    if coeff is None:
        raise ValueError(f"form must be 'printed' or 'derived', got {form!r}")
    if reference is None:
        reference = reference_integral(f, iv)
    avg = 0.5 * (f.value_at(0, x) + f.value_at(0, iv.a + iv.b - x))
    total = avg + sum(coeff(x, k, n, f, iv) for k in range(1, n))
    return float(total / n - reference / iv.length)


def gs_identity_residual(x: float, n: int, f: TestFunction, iv: Interval, form: str = "printed") -> float:
    """|LHS - RHS| of the companion-rule representation.

    ``form="printed"`` uses the closed coefficients :func:`gs_G_k`; ``"derived"``
    uses T_k + F_k from the general identity, which is exact for every x.
    """
    gs_nodes(x, iv)
    lhs = gs_lhs(x, n, f, iv, form)
    return abs(lhs - gs_kernel_integral(x, n, f, iv))
