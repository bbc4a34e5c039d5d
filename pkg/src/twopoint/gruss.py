"""Chebyshev functional, Grüss-type bounds and the functionals built on the symmetric rule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import oracle
from .algebra import Polynomial, poly_shift_power
from .fink import FinkContext, gs_lhs
from .kernels import Interval, eval_K, gs_nodes
from .quadrature import reference_integral
from .testlib import NormSpec, TestFunction, extrema, lp_norm

ENVELOPE_GRID = 1024
CLAMP = 1e-12

Handle = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FunctionalPair:
    h1: Handle
    h2: Handle
    dh1: Optional[Handle] = None
    dh2: Optional[Handle] = None
    env1: Optional[tuple[float, float]] = None
    env2: Optional[tuple[float, float]] = None
    breakpoints: tuple[float, ...] = field(default=())

    def check_envelopes(self, iv: Interval) -> None:
        t = np.linspace(iv.a, iv.b, ENVELOPE_GRID)
        for label, h, env in (("h1", self.h1, self.env1), ("h2", self.h2, self.env2)):
            if env is None:
                continue
            _check_envelope(label, h, env, t)


def _check_envelope(label: str, h: Handle, env: tuple[float, float], t: np.ndarray) -> None:
    lo, hi = env
    vals = np.asarray(h(t), dtype=float)
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if lo > hi or np.any(vals < lo - slack) or np.any(vals > hi + slack):
        raise ValueError(f"{label} leaves its declared envelope [{lo}, {hi}]")


def _mean(h: Handle, iv: Interval, cuts) -> float:
    return oracle.integrate(h, iv.a, iv.b, breakpoints=cuts).value / iv.length


def chebyshev_T(pair: FunctionalPair, iv: Interval) -> float:
    cuts = pair.breakpoints
    m12 = _mean(lambda t: pair.h1(t) * pair.h2(t), iv, cuts)
    return m12 - _mean(pair.h1, iv, cuts) * _mean(pair.h2, iv, cuts)


def _variance(h: Handle, iv: Interval, cuts) -> float:
    v = chebyshev_T(FunctionalPair(h, h, breakpoints=cuts), iv)
    if v < 0:
        if v < -CLAMP:
            raise ArithmeticError(f"negative variance {v:.3e}: oracle failure")
        v = 0.0
    return v


def pre_gruss_check(pair: FunctionalPair, iv: Interval) -> tuple[float, float]:
    cuts = pair.breakpoints
    lhs = abs(chebyshev_T(pair, iv))
    rhs = math.sqrt(_variance(pair.h1, iv, cuts)) * math.sqrt(_variance(pair.h2, iv, cuts))
    return lhs, rhs


def ramified_bound(pair: FunctionalPair, iv: Interval, phi: float, Phi: float) -> float:
    """(Phi - phi)/2 * sqrt(T(h2, h2)) where phi <= h1 <= Phi.

    The envelope has to sit on h1, the member that is not under the square root.
    """
    _check_envelope("h1", pair.h1, (phi, Phi), np.linspace(iv.a, iv.b, ENVELOPE_GRID))
    return 0.5 * (Phi - phi) * math.sqrt(_variance(pair.h2, iv, pair.breakpoints))


def _require(value, what: str, which: str):
    if value is None:
        raise ValueError(f"{which} bound needs {what}")
    return value


def classical_bound(pair: FunctionalPair, iv: Interval, which: str) -> float:
    L, cuts = iv.length, pair.breakpoints
    if which == "chebyshev":
        d1 = oracle.grid_sup(_require(pair.dh1, "dh1", which), iv.a, iv.b)
        d2 = oracle.grid_sup(_require(pair.dh2, "dh2", which), iv.a, iv.b)
        return L**2 / 12 * d1 * d2
    if which == "gruss":
        pair.check_envelopes(iv)
        m1, M1 = _require(pair.env1, "env1", which)
        m2, M2 = _require(pair.env2, "env2", which)
        return 0.25 * (M1 - m1) * (M2 - m2)
    if which == "lupas":
        n1 = oracle.integrate(lambda t: _require(pair.dh1, "dh1", which)(t) ** 2, iv.a, iv.b, cuts).value
        n2 = oracle.integrate(lambda t: _require(pair.dh2, "dh2", which)(t) ** 2, iv.a, iv.b, cuts).value
        return L / math.pi**2 * math.sqrt(n1) * math.sqrt(n2)
    if which == "ostrowski":
        pair.check_envelopes(iv)
        m, M = _require(pair.env1, "env1", which)
        d2 = oracle.grid_sup(_require(pair.dh2, "dh2", which), iv.a, iv.b)
        return L * (M - m) * d2 / 8
    raise ValueError(f"unknown classical bound {which!r}")


CLASSICAL = ("chebyshev", "gruss", "lupas", "ostrowski")


# --- pairings built on the symmetric rule ---------------------------------------

def _power(u, k: int):
    """u**k with the k = -1 case (times a zero factor) mapped to 0."""
    u = np.asarray(u, dtype=float)
    return u**k if k >= 0 else np.zeros_like(u)


def one_sided_extrema(h: Handle, iv: Interval, cuts=()) -> tuple[float, float]:
    """Grid extrema of h, widened by its one-sided values at the jump points."""
    lo, hi = oracle.grid_extrema(h, iv.a, iv.b)
    eps = 1e-12 * iv.length
    edge = np.array([s for c in cuts for s in (c - eps, c + eps) if iv.a <= s <= iv.b])
    if edge.size:
        vals = np.asarray(h(edge), dtype=float)
        lo, hi = min(lo, float(vals.min())), max(hi, float(vals.max()))
    return lo, hi


def with_envelopes(pair: FunctionalPair, iv: Interval) -> FunctionalPair:
    """Copy of the pair with tight envelopes measured on both members."""
    cuts = pair.breakpoints
    return replace(pair, env1=one_sided_extrema(pair.h1, iv, cuts), env2=one_sided_extrema(pair.h2, iv, cuts))


def _gs_pieces(x: float, iv: Interval) -> list[tuple[float, float, Polynomial]]:
    """S(t, x) as three linear pieces over [a,x], [x,a+b-x], [a+b-x,b]."""
    nodes = gs_nodes(x, iv)
    return [
        (iv.a, nodes.y, Polynomial([-iv.a, 1.0])),
        (nodes.y, nodes.z, Polynomial([-iv.mid, 1.0])),
        (nodes.z, iv.b, Polynomial([-iv.b, 1.0])),
    ]


def gs_weight_mean(x: float, n: int, iv: Interval) -> float:
    """Exact mean of (x - t)^(n-1) S(t, x) from its polynomial pieces."""
    w = poly_shift_power(x, n - 1)  # (t-x)^(n-1)/(n-1)!
    scale = (-1) ** (n - 1) * math.factorial(n - 1)
    total = sum((w * piece).integral(lo, hi) for lo, hi, piece in _gs_pieces(x, iv))
    return scale * total / iv.length


def _mean_deriv(f: TestFunction, k: int, iv: Interval) -> float:
    """Mean of f^(k) over [a, b] from f^(k-1) at the ends (oracle for k = 0)."""
    if k == 0:
        return reference_integral(f, iv) / iv.length
    return (f.value_at(k - 1, iv.b) - f.value_at(k - 1, iv.a)) / iv.length


def P_functional(f: TestFunction, x: float, n: int, iv: Interval, form: str = "printed") -> float:
    """Symmetric-rule deficit minus the product-of-means correction.

    ``printed`` uses the closed G_k and the closed mean of the weight,
    ``derived`` uses exact coefficients and the exact weight mean.
    """
    gs_nodes(x, iv)
    slope = _mean_deriv(f, n, iv)
    if form == "printed":
        base = gs_lhs(x, n, f, iv, "printed")
        weight = 2 * ((x - iv.a) ** (n + 1) + (iv.mid - x) ** (n + 1)) / (math.factorial(n + 1) * n * iv.length)
        return base - weight * slope
    if form == "derived":
        base = gs_lhs(x, n, f, iv, "derived")
        return base - gs_weight_mean(x, n, iv) * slope / math.factorial(n)
    raise ValueError(f"form must be 'printed' or 'derived', got {form!r}")


def P_pair(f: TestFunction, x: float, n: int, iv: Interval) -> FunctionalPair:
    nodes = gs_nodes(x, iv)
    fn = math.factorial(n)
    return FunctionalPair(
        h1=lambda t: f.value_at(n, t) / fn,
        h2=lambda t: (x - t) ** (n - 1) * eval_K(t, nodes, iv),
        dh1=lambda t: f.value_at(n + 1, t) / fn,
        dh2=lambda t: (x - t) ** (n - 1) - (n - 1) * _power(x - t, n - 2) * eval_K(t, nodes, iv),
        breakpoints=(nodes.y, nodes.z),
    )


def Q_functional(f: TestFunction, x: float, n: int, iv: Interval, form: str = "printed") -> float:
    gs_nodes(x, iv)
    fn = math.factorial(n)
    weight = ((x - iv.a) ** n - (x - iv.b) ** n) / (n * iv.length)
    xr = iv.a + iv.b - x
    if form == "printed":
        h1_mean = (f.value_at(n, x) + f.value_at(n, xr)) / (2 * fn)
        return gs_lhs(x, n, f, iv, "printed") - weight * h1_mean
    if form == "derived":
        avg = 0.5 * (f.value_at(n - 1, x) + f.value_at(n - 1, xr))
        h1_mean = (avg - _mean_deriv(f, n - 1, iv)) / fn
        return gs_lhs(x, n, f, iv, "derived") - weight * h1_mean
    raise ValueError(f"form must be 'printed' or 'derived', got {form!r}")


def Q_pair(f: TestFunction, x: float, n: int, iv: Interval) -> FunctionalPair:
    nodes = gs_nodes(x, iv)
    fn = math.factorial(n)
    return FunctionalPair(
        h1=lambda t: f.value_at(n, t) * eval_K(t, nodes, iv) / fn,
        h2=lambda t: (x - t) ** (n - 1) + 0 * t,
        dh1=lambda t: (f.value_at(n + 1, t) * eval_K(t, nodes, iv) + f.value_at(n, t)) / fn,
        dh2=lambda t: -(n - 1) * _power(x - t, n - 2),
        breakpoints=(nodes.y, nodes.z),
    )


def A_coef(n: int) -> float:
    return 2 * (n - 1) ** 2 / ((2 * n - 1) * (2 * n - 2) * (2 * n - 3))


def B_coef(n: int) -> float:
    num = 2 ** (2 * n - 3) * (2 * n - 1) * (2 * n - 2) + 4 * n * (2 * n - 1) + 2 * n**2
    return num / ((2 * n - 1) * (2 * n - 2) * (2 * n - 3))


P_BRANCHES = ("chebyshev", "gruss", "lupas", "ostrowski", "ostrowski-dual")


def bound_P(f: TestFunction, x: float, n: int, iv: Interval, branch: str) -> float:
    """Closed-form bound on the P functional, one of five branches (n >= 2)."""
    if n < 2:
        raise ValueError("bound_P needs n >= 2")
    gs_nodes(x, iv)
    L, fn2 = iv.length, math.factorial(n) ** 2
    c = (1.0 if n == 2 else ((n - 2) / n) ** (n - 2)) * (n * n - 2 * n + 2) / n
    w = L / 4 + abs(x - (3 * iv.a + iv.b) / 4)
    tail = 2.0 ** (-n - 2) - 2.0 ** (-2 * n - 2)
    if branch == "chebyshev":
        return L**2 * c / (12 * fn2) * w ** (n - 1) * lp_norm(f, n + 1, NormSpec(math.inf), iv)
    if branch == "gruss":
        m, M = extrema(f, n, iv)
        return c / (4 * fn2) * tail * L ** (n - 2) * (M - m)
    if branch == "lupas":
        root = math.sqrt(A_coef(n) * (x - iv.a) ** (2 * n - 1) + B_coef(n) * (iv.mid - x) ** (2 * n - 1))
        return L / (fn2 * math.pi**2) * root * lp_norm(f, n + 1, NormSpec(2), iv)
    if branch == "ostrowski":
        m, M = extrema(f, n, iv)
        return L * c / (8 * fn2) * w ** (n - 1) * (M - m)
    if branch == "ostrowski-dual":
        return c / (8 * fn2) * tail * L**n * lp_norm(f, n + 1, NormSpec(math.inf), iv)
    raise ValueError(f"unknown branch {branch!r}; choose from {P_BRANCHES}")


# --- general harmonic sequence ----------------------------------------------------

def _check_L(ctx: FinkContext, x: float) -> None:
    if len(ctx.seq) < ctx.n + 2:
        raise ValueError(f"L functional needs Q_0..Q_{ctx.n + 1}; sequence has {len(ctx.seq)} terms")
    gs_nodes(x, ctx.iv)


def L_pair(ctx: FinkContext, f: TestFunction, x: float) -> FunctionalPair:
    n, iv, q = ctx.n, ctx.iv, ctx.seq[ctx.n - 1]
    nodes = gs_nodes(x, iv)
    sign = (-1) ** (n - 1) / n
    return FunctionalPair(
        h1=lambda t: sign * f.value_at(n, t),
        h2=lambda t: q(t) * eval_K(t, nodes, iv),
        dh1=lambda t: sign * f.value_at(n + 1, t),
        dh2=_weight_deriv(ctx, x),
        breakpoints=(nodes.y, nodes.z),
    )


def L_functional(ctx: FinkContext, f: TestFunction, x: float) -> float:
    _check_L(ctx, x)
    n, iv, seq = ctx.n, ctx.iv, ctx.seq
    nodes = gs_nodes(x, iv)
    sign = (-1) ** (n - 1) / n
    q = seq[n - 1]
    integral = oracle.integrate(
        lambda t: q(t) * eval_K(t, nodes, iv) * f.value_at(n, t),
        iv.a, iv.b, breakpoints=(nodes.y, nodes.z),
    ).value
    weight = 0.5 * (seq[n](x) + seq[n](iv.a + iv.b - x)) - (seq[n + 1](iv.b) - seq[n + 1](iv.a)) / iv.length
    slope = (f.value_at(n - 1, iv.b) - f.value_at(n - 1, iv.a)) / iv.length
    return sign * integral / iv.length - weight * sign * slope


L_BRANCHES = P_BRANCHES


def _weight_deriv(ctx: FinkContext, x: float) -> Handle:
    """Almost-everywhere derivative of Q_{n-1} S: Q_{n-2} S + Q_{n-1}."""
    n, iv = ctx.n, ctx.iv
    nodes = gs_nodes(x, iv)
    q1 = ctx.seq[n - 1]
    if n == 1:
        return lambda t: q1(t) + 0 * t
    q2 = ctx.seq[n - 2]
    return lambda t: q1(t) + q2(t) * eval_K(t, nodes, iv)


def _sup_abs(g: Handle, iv: Interval, cuts) -> float:
    h = 1e-12 * iv.length
    edge = np.array([s for c in cuts for s in (c - h, c + h) if iv.a <= s <= iv.b])
    extra = float(np.max(np.abs(g(edge)), initial=0.0)) if edge.size else 0.0
    return max(oracle.grid_sup(g, iv.a, iv.b), extra)


def L_weight_extrema(ctx: FinkContext, x: float) -> tuple[float, float]:
    """(min, max) of Q_{n-1}(t) S(t, x), including the one-sided limits at the jumps."""
    iv = ctx.iv
    nodes = gs_nodes(x, iv)
    q = ctx.seq[ctx.n - 1]
    return one_sided_extrema(lambda t: q(t) * eval_K(t, nodes, iv), iv, (nodes.y, nodes.z))


def D_coef(ctx: FinkContext, x: float) -> float:
    nodes = gs_nodes(x, ctx.iv)
    g = _weight_deriv(ctx, x)
    return math.sqrt(oracle.integrate(lambda t: g(t) ** 2, ctx.iv.a, ctx.iv.b,
                                      breakpoints=(nodes.y, nodes.z)).value)


def bound_L(ctx: FinkContext, f: TestFunction, x: float, branch: str) -> float:
    """Five-branch bound on the L functional; M1, m1 are the extrema of f^(n)."""
    n, iv = ctx.n, ctx.iv
    if n < 2:
        raise ValueError("bound_L needs n >= 2")
    _check_L(ctx, x)
    nodes = gs_nodes(x, iv)
    L = iv.length
    if branch in ("chebyshev", "ostrowski"):
        wd = _sup_abs(_weight_deriv(ctx, x), iv, (nodes.y, nodes.z))
        if branch == "chebyshev":
            return L**2 / (12 * n) * wd * lp_norm(f, n + 1, NormSpec(math.inf), iv)
        m1, M1 = extrema(f, n, iv)
        return L / (8 * n) * wd * (M1 - m1)
    if branch == "gruss":
        m1, M1 = extrema(f, n, iv)
        m2, M2 = L_weight_extrema(ctx, x)
        return (M1 - m1) * (M2 - m2) / (4 * n)
    if branch == "lupas":
        return L / (math.pi**2 * n) * D_coef(ctx, x) * lp_norm(f, n + 1, NormSpec(2), iv)
    if branch == "ostrowski-dual":
        m2, M2 = L_weight_extrema(ctx, x)
        return L / (8 * n) * (M2 - m2) * lp_norm(f, n + 1, NormSpec(math.inf), iv)
    raise ValueError(f"unknown branch {branch!r}; choose from {L_BRANCHES}")


def gruss_envelope_factor(ctx: FinkContext, f: TestFunction) -> dict[str, float]:
    """Both readings of (M1 - m1): extrema of f^(n), and of h1 = f^(n)/n with sign."""
    m1, M1 = extrema(f, ctx.n, ctx.iv)
    return {"f_n": M1 - m1, "h1": (M1 - m1) / ctx.n}


__all__ = [
    "A_coef", "B_coef", "CLASSICAL", "D_coef", "FunctionalPair", "L_functional", "L_pair",
    "P_functional", "P_pair", "Q_functional", "Q_pair", "bound_L", "bound_P",
    "chebyshev_T", "classical_bound", "gs_weight_mean",
    "one_sided_extrema", "pre_gruss_check", "ramified_bound", "with_envelopes",
]
