"""Error estimators for the two-point rule and probes of their sharpness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import oracle
from .algebra import beta, gamma_ratio
from .fink import FinkContext
from .kernels import (
    Interval,
    NodeTriple,
    abs_moment_S,
    eval_K,
    eval_S,
    gs_nodes,
    lq_norm_S,
    q_moment_S,
    sup_abs_K,
    sup_abs_S,
)
from .quadrature import remainder_numeric
from .testlib import HolderSpec, NormSpec, TestFunction

REL_SLACK = 1e-8
ABS_SLACK = 1e-12


@dataclass(frozen=True)
class BoundReport:
    bound_name: str
    n: int
    p: NormSpec
    nodes: NodeTriple
    iv: Interval
    bound_value: float
    remainder_abs: float
    h_estimated: bool = False

    @property
    def satisfied(self) -> bool:
        return bool(self.remainder_abs <= self.bound_value * (1 + REL_SLACK) + ABS_SLACK)

    @property
    def tightness(self) -> float:
        return 0.0 if self.bound_value == 0 else self.remainder_abs / self.bound_value

    def to_dict(self) -> dict:
        return {
            "bound": self.bound_name,
            "n": self.n,
            "p": self.p.label(),
            "nodes": self.nodes.as_list(),
            "interval": [self.iv.a, self.iv.b],
            "value": self.bound_value,
            "remainder": self.remainder_abs,
            "satisfied": self.satisfied,
            "tightness": self.tightness,
            "h_estimated": self.h_estimated,
        }


def _nonneg(name: str, value: float) -> None:
    if value < 0:
        raise ValueError(f"{name} must be nonnegative, got {value}")


def bound_variation(n: int, p: NormSpec, nodes: NodeTriple, iv: Interval, varval: float) -> float:
    """sup|S_n| times the p-variation of f^(n-1); the factor does not depend on p."""
    _nonneg("varval", varval)
    return sup_abs_S(n, nodes, iv) * varval


def bound_lp(n: int, p: NormSpec, nodes: NodeTriple, iv: Interval, normval: float) -> float:
    """||S_n||_q times ||f^(n)||_p with q conjugate to p."""
    _nonneg("normval", normval)
    if p.p == 1:
        factor = sup_abs_S(n, nodes, iv)
    elif p.is_inf:
        factor = abs_moment_S(n, nodes, iv)
    else:
        q = p.conjugate
        factor = q_moment_S(n, q, nodes, iv) ** (1.0 / q)
    return factor * normval


# --- extremal functions ---------------------------------------------------------

def extremal_f0(n: int, p: NormSpec, nodes: NodeTriple, iv: Interval) -> TestFunction:
    """Function whose n-th derivative is sgn(S_n)|S_n|^(1/(p-1)) (sgn(S_n) for p = inf).

    Lower derivatives are repeated integrals from a, evaluated with the oracle;
    they are slow and only needed for spot checks.
    """
    if p.p == 1:
        raise ValueError("no extremal function for p = 1; use epsilon_spike")
    nodes.check(iv)
    expo = 0.0 if p.is_inf else 1.0 / (p.p - 1.0)
    cuts = (nodes.y, nodes.x, nodes.z)

    def top(t):
        s = eval_S(n, np.asarray(t, dtype=float), nodes, iv)
        return np.sign(s) * np.abs(s) ** expo

    def deriv(k, t):
        if k == n:
            return top(t)
        m = n - 1 - k
        def one(s):
            return oracle.integrate(
                lambda u: (s - u) ** m / math.factorial(m) * top(u), iv.a, s, breakpoints=cuts
            ).value
        arr = np.asarray(t, dtype=float)
        out = np.vectorize(one)(arr)
        return float(out) if np.ndim(out) == 0 else out

    return TestFunction(f"extremal(n={n},p={p.label()})", n, deriv)


def lp_tightness(n: int, p: NormSpec, nodes: NodeTriple, iv: Interval) -> float:
    """|R_n(f0)| / bound_lp for the extremal function; 1 means the bound is attained."""
    from .testlib import lp_norm

    f0 = extremal_f0(n, p, nodes, iv)
    rem = abs(remainder_numeric(f0, n, nodes, iv))
    bound = bound_lp(n, p, nodes, iv, lp_norm(f0, n, p, iv, nodes.as_list()))
    return 0.0 if bound == 0 else rem / bound


@dataclass(frozen=True)
class Spike:
    """Unit-mass ramp derivative: 1/eps on a window of width eps beside t0."""

    t0: float
    eps: float
    side: Literal["left", "right"]

    @property
    def window(self) -> tuple[float, float]:
        return (self.t0 - self.eps, self.t0) if self.side == "left" else (self.t0, self.t0 + self.eps)

    def density(self, t):
        lo, hi = self.window
        t = np.asarray(t, dtype=float)
        return np.where((t >= lo) & (t <= hi), 1.0 / self.eps, 0.0)

    def mass(self) -> float:
        lo, hi = self.window
        return oracle.integrate(self.density, lo, hi).value


def epsilon_spike(t0: float, eps: float, side: str) -> Spike:
    if eps <= 0:
        raise ValueError("eps must be positive")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    return Spike(t0, eps, side)


def spike_ratio(n: int, nodes: NodeTriple, iv: Interval, spike: Spike) -> float:
    """|integral of S_n against the spike| / sup|S_n|."""
    lo, hi = spike.window
    if lo < iv.a or hi > iv.b:
        raise ValueError("spike window leaves the interval")
    val = oracle.integrate(lambda t: eval_S(n, t, nodes, iv), lo, hi,
                           breakpoints=(nodes.y, nodes.z)).value / spike.eps
    sup = sup_abs_S(n, nodes, iv)
    return 0.0 if sup == 0 else abs(val) / sup


def best_spike(n: int, nodes: NodeTriple, iv: Interval, eps: float) -> tuple[Spike, float]:
    """Spike placed on the side of y or z where |S_n| attains its supremum."""
    y, x, z = nodes.check(iv).as_list()
    candidates = [
        (abs(y - iv.a), epsilon_spike(y, eps, "left")),
        (abs(y - x), epsilon_spike(y, eps, "right")),
        (abs(z - x), epsilon_spike(z, eps, "left")),
        (abs(iv.b - z), epsilon_spike(z, eps, "right")),
    ]
    best = None
    for height, sp in sorted(candidates, key=lambda c: -c[0]):
        lo, hi = sp.window
        if lo < iv.a or hi > iv.b:
            continue
        r = spike_ratio(n, nodes, iv, sp)
        if best is None or r > best[1]:
            best = (sp, r)
    if best is None:
        raise ValueError("eps too large for every candidate window")
    return best


# --- Hölder-type bounds ---------------------------------------------------------

def bound_holder(n: int, spec: HolderSpec, nodes: NodeTriple, iv: Interval, t0: float,
                 p: NormSpec) -> float:
    """H times the Hölder-paired kernel factor; ``p`` is the exponent on |t - t0|^r.

    p = 1 pairs with ||S_{n-1}||_inf, p = inf with ||S_{n-1}||_1, otherwise ||S_{n-1}||_q.
    """
    if not iv.a <= t0 <= iv.b:
        raise ValueError("t0 must lie in [a, b]")
    r, H = spec.r, spec.H
    left, right = t0 - iv.a, iv.b - t0
    if p.p == 1:
        factor = (right ** (r + 1) + left ** (r + 1)) / (r + 1) * sup_abs_S(n - 1, nodes, iv)
    elif p.is_inf:
        factor = (iv.length / 2 + abs(t0 - iv.mid)) ** r * abs_moment_S(n - 1, nodes, iv)
    else:
        e = p.p * r + 1
        factor = ((right**e + left**e) / e) ** (1.0 / p.p) * lq_norm_S(n - 1, p.conjugate, nodes, iv)
    return H * factor


def bound_holder_collapsed(n: int, spec: HolderSpec, x: float, iv: Interval) -> float:
    if not iv.a <= x <= iv.b:
        raise ValueError("x must lie in [a, b]")
    r = spec.r
    return spec.H * gamma_ratio(r, n) * ((x - iv.a) ** (r + n) + (iv.b - x) ** (r + n))


def tilde_remainder(n: int, t0: float, nodes: NodeTriple, iv: Interval, f: TestFunction) -> float:
    """(-1)^n times the integral of [f^(n-1)(t) - f^(n-1)(t0)] S_{n-1}(t)."""
    c = f.value_at(n - 1, t0)
    val = oracle.integrate(
        lambda t: (f.value_at(n - 1, t) - c) * eval_S(n - 1, t, nodes, iv),
        iv.a, iv.b, breakpoints=(*nodes.as_list(), t0),
    ).value
    return (-1) ** n * val


def boundary_terms(n: int, t0: float, nodes: NodeTriple, iv: Interval, f: TestFunction,
                   sign: int) -> float:
    y, x, z = nodes.as_list()
    c = f.value_at(n - 1, t0)
    left = ((y - iv.a) ** n - (y - x) ** n) * (f.value_at(n - 1, y) - c)
    right = ((z - x) ** n - (z - iv.b) ** n) * (f.value_at(n - 1, z) - c)
    return sign * (left + right) / math.factorial(n)


def decomposition_residual(n: int, t0: float, nodes: NodeTriple, iv: Interval, f: TestFunction,
                           form: str = "derived") -> float:
    """|R_n - boundary terms - R~_n|.

    The boundary jumps of S_n carry the sign (-1)^(n+1) (``form="derived"``);
    ``form="printed"`` uses (-1)^n instead.
    """
    signs = {"derived": (-1) ** (n + 1), "printed": (-1) ** n}
    if form not in signs:
        raise ValueError(f"form must be one of {sorted(signs)}")
    rem = remainder_numeric(f, n, nodes, iv)
    bt = boundary_terms(n, t0, nodes, iv, f, signs[form])
    return abs(rem - bt - tilde_remainder(n, t0, nodes, iv, f))


# --- bounds for the harmonic-sequence representation -----------------------------

def _qk_abs(ctx: FinkContext):
    q, nodes, iv = ctx.seq[ctx.n - 1], ctx.nodes, ctx.iv
    return lambda t: np.abs(q(t) * eval_K(t, nodes, iv))


def fink_kernel_norm(ctx: FinkContext, q: float) -> float:
    """||Q_{n-1} K||_q for q in [1, inf]."""
    g = _qk_abs(ctx)
    iv, cuts = ctx.iv, ctx.nodes.as_list()
    if math.isinf(q):
        return max(oracle.grid_sup(g, iv.a, iv.b), _one_sided_sup(g, ctx))
    val = oracle.integrate(lambda t: g(t) ** q, iv.a, iv.b, breakpoints=cuts).value
    return val ** (1.0 / q)


def _one_sided_sup(g, ctx: FinkContext) -> float:
    # K jumps at y and z; the grid may miss the open-side limits
    iv, (y, _, z) = ctx.iv, ctx.nodes.as_list()
    h = 1e-12 * iv.length
    pts = [s for s in (y + h, z - h) if iv.a <= s <= iv.b]
    return float(np.max(g(np.array(pts)))) if pts else 0.0


def bound_fink(n: int, p: NormSpec, ctx: FinkContext, normval: float) -> float:
    _nonneg("normval", normval)
    if n != ctx.n:
        raise ValueError("n must match the context order")
    return fink_kernel_norm(ctx, p.conjugate) / n * normval


def poly_lq_norm(ctx: FinkContext, q: float) -> float:
    poly, iv = ctx.seq[ctx.n - 1], ctx.iv
    g = lambda t: np.abs(poly(t))
    if math.isinf(q):
        return oracle.grid_sup(g, iv.a, iv.b)
    return oracle.integrate(lambda t: g(t) ** q, iv.a, iv.b).value ** (1.0 / q)


def bound_fink_factored(n: int, p: NormSpec, ctx: FinkContext, normval: float) -> float:
    _nonneg("normval", normval)
    if n != ctx.n:
        raise ValueError("n must match the context order")
    return sup_abs_K(ctx.nodes, ctx.iv) * poly_lq_norm(ctx, p.conjugate) / n * normval


def fink_error(ctx: FinkContext, f: TestFunction) -> float:
    """E_n: (-1)^n / n times the oracle integral of Q_{n-1} K f^(n)."""
    from .fink import fink_quadrature

    return fink_quadrature(ctx, f)[1]


# --- companion (symmetric) rule --------------------------------------------------

def gs_sharp_constant(n: int, p: NormSpec, x: float, iv: Interval) -> float:
    """Closed-form constant for the symmetric rule, as stated with 0^0 = 1."""
    a, b = iv.a, iv.b
    if not a <= x <= iv.mid:
        raise ValueError(f"x must lie in [a, (a+b)/2], got {x}")
    L, fn = iv.length, math.factorial(n)
    if p.p == 1:
        ratio = 1.0 if n == 1 else ((n - 1) / n) ** (n - 1)
        return ratio * (L / 4 + abs(x - (3 * a + b) / 4)) ** n / (n * fn * L)
    q = p.conjugate
    e = n * q + 1
    core = ((x - a) ** e + (iv.mid - x) ** e) ** (1.0 / q)
    return 2 ** (1.0 / q) / (fn * L) * core * beta((n - 1) * q + 1, q + 1) ** (1.0 / q)


def gs_kernel_norm(n: int, p: NormSpec, x: float, iv: Interval) -> float:
    """Oracle value of ||(x-t)^(n-1) S(t,x)||_q / (n!(b-a)), the best constant."""
    nodes = gs_nodes(x, iv)
    g = lambda t: np.abs((x - t) ** (n - 1) * eval_K(t, nodes, iv))
    q = p.conjugate
    if math.isinf(q):
        h = 1e-12 * iv.length
        edge = [s for s in (nodes.y + h, nodes.z - h) if iv.a <= s <= iv.b]
        val = max(oracle.grid_sup(g, iv.a, iv.b), float(np.max(g(np.array(edge)), initial=0.0)))
    else:
        val = oracle.integrate(lambda t: g(t) ** q, iv.a, iv.b, breakpoints=nodes.as_list()).value ** (1 / q)
    return val / (math.factorial(n) * iv.length)


def gs_extremal(n: int, p: NormSpec, x: float, iv: Interval) -> TestFunction:
    """n-th derivative sgn(g)|g|^(q-1) with g = (x-t)^(n-1) S(t,x); only order n is provided."""
    if p.p == 1:
        raise ValueError("no extremal function for p = 1")
    nodes = gs_nodes(x, iv)
    expo = 0.0 if p.is_inf else p.conjugate - 1.0

    def deriv(k, t):
        if k != n:
            raise ValueError("gs_extremal only provides the n-th derivative")
        t = np.asarray(t, dtype=float)
        g = (x - t) ** (n - 1) * eval_K(t, nodes, iv)
        return np.sign(g) * np.abs(g) ** expo

    return TestFunction(f"gs-extremal(n={n},p={p.label()})", n, lambda k, t: deriv(k, t))


def gs_sharpness_ratio(n: int, p: NormSpec, x: float, iv: Interval) -> float:
    """True error of the extremal function over the closed-form bound; above 1 is a violation."""
    from .fink import gs_kernel_integral
    from .testlib import lp_norm

    f0 = gs_extremal(n, p, x, iv)
    err = abs(gs_kernel_integral(x, n, f0, iv))
    bound = gs_sharp_constant(n, p, x, iv) * lp_norm(f0, n, p, iv, gs_nodes(x, iv).as_list())
    return math.inf if bound == 0 and err > 0 else (0.0 if bound == 0 else err / bound)


def gs_spike_ratio(n: int, x: float, iv: Interval, eps: float) -> float:
    """p = 1 probe: unit-mass spike beside the peak of |(x-t)^(n-1) S(t,x)|, error over bound."""
    nodes = gs_nodes(x, iv)
    g = lambda t: (x - t) ** (n - 1) * eval_K(t, nodes, iv)
    t = np.linspace(iv.a, iv.b, oracle.GRID_POINTS)
    peaks = {float(t[np.argmax(np.abs(g(t)))]), nodes.y, nodes.z}
    bound = gs_sharp_constant(n, NormSpec(1.0), x, iv)
    best = 0.0
    for t0 in peaks:
        for side in ("left", "right"):
            sp = epsilon_spike(t0, eps, side)
            lo, hi = sp.window
            if lo < iv.a or hi > iv.b:
                continue
            val = oracle.integrate(g, lo, hi, breakpoints=(nodes.y, nodes.z)).value / eps
            err = abs(val) / (math.factorial(n) * iv.length)
            best = max(best, math.inf if bound == 0 and err > 0 else err / bound)
    return best
