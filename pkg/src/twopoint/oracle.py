"""Reference machinery: adaptive Gauss-Kronrod integration, grid suprema, FD checks.

Everything in the rest of the package is checked against these routines, so they
deliberately share no code with the closed forms they verify.
"""

from __future__ import annotations

import heapq
import math
import os
import warnings
from typing import Callable, Iterable, NamedTuple

import numpy as np

# Kronrod 15-point abscissae/weights with the embedded 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss weights laid out on the same 15 nodes (zero on Kronrod-only nodes).
_GW = np.zeros(15)
_GW[[1, 3, 5, 13, 11, 9]] = np.concatenate([_WG[:-1], _WG[:-1]])
_GW[7] = _WG[-1]

_EPS = np.finfo(float).eps
MAX_PANELS = 2000
REL_TOL = 1e-13
GRID_POINTS = 4096
GOLDEN_STEPS = 30


class OracleWarning(UserWarning):
    pass


class Quad(NamedTuple):
    value: float
    err_est: float
    converged: bool


def default_tol(length: float) -> float:
    env = os.environ.get("QUAD_ORACLE_TOL")
    base = float(env) if env else 1e-12
    return base * (1.0 + abs(length))


def _evaluate(g: Callable, t: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(g(t), dtype=float)
    except TypeError:
        vals = None
    if vals is None or vals.shape != t.shape:
        vals = np.array([float(g(float(s))) for s in t])
    if not np.all(np.isfinite(vals)):
        bad = t[~np.isfinite(vals)][0]
        raise FloatingPointError(f"integrand is not finite at t={bad!r}")
    return vals


def _gk15(g: Callable, lo: float, hi: float) -> tuple[float, float, float]:
    half = 0.5 * (hi - lo)
    center = 0.5 * (hi + lo)
    fv = _evaluate(g, center + half * _NODES)
    resk = float(np.dot(_KW, fv))
    resg = float(np.dot(_GW, fv))
    reskh = 0.5 * resk
    resabs = float(np.dot(_KW, np.abs(fv))) * abs(half)
    resasc = float(np.dot(_KW, np.abs(fv - reskh))) * abs(half)
    value = resk * half
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * _EPS):
        err = max(50 * _EPS * resabs, err)
    return float(value), float(err), resabs


def _adaptive(g: Callable, lo: float, hi: float, tol: float, rel_tol: float) -> tuple[Quad, float]:
    value, err, mag = _gk15(g, lo, hi)
    heap = [(-err, lo, hi, value, mag)]
    total_err, total_mag = err, mag
    while total_err > max(tol, rel_tol * total_mag) and len(heap) < MAX_PANELS:
        neg_err, p, q, _, m = heapq.heappop(heap)
        mid = 0.5 * (p + q)
        v1, e1, m1 = _gk15(g, p, mid)
        v2, e2, m2 = _gk15(g, mid, q)
        total_err += e1 + e2 + neg_err
        total_mag += m1 + m2 - m
        heapq.heappush(heap, (-e1, p, mid, v1, m1))
        heapq.heappush(heap, (-e2, mid, q, v2, m2))
    total = math.fsum(item[3] for item in heap)
    total_err = sum(-item[0] for item in heap)
    total_mag = sum(item[4] for item in heap)
    return Quad(total, total_err, total_err <= max(tol, rel_tol * total_mag)), total_mag


def _span(a, b, rest):
    """Accept either (a, b, ...) or (interval, ...); returns (a, b, first trailing argument)."""
    if hasattr(a, "a") and hasattr(a, "b"):
        return a.a, a.b, b if b is not None else rest
    return a, b, rest


def integrate(
    g: Callable,
    a,
    b=None,
    breakpoints: Iterable[float] = (),
    abs_tol: float | None = None,
    rel_tol: float = REL_TOL,
) -> Quad:
    """Integrate ``g`` over [a, b] (or an Interval), splitting at ``breakpoints``.

    ``g`` should accept a numpy array; scalar-only callables are evaluated
    pointwise. Refinement stops once the error estimate is below
    ``max(abs_tol, rel_tol * integral of |g|)``; the relative floor sits above
    the roundoff level of the Kronrod sum. Otherwise an :class:`OracleWarning`
    is emitted and ``converged`` is False.
    """
    a, b, breakpoints = _span(a, b, breakpoints)
    if b < a:
        r = integrate(g, b, a, breakpoints, abs_tol, rel_tol)
        return Quad(-r.value, r.err_est, r.converged)
    if abs_tol is None:
        abs_tol = default_tol(b - a)
    if a == b:
        return Quad(0.0, 0.0, True)
    pts = sorted({a, b, *(float(p) for p in breakpoints if a < p < b)})
    pieces = [(p, q) for p, q in zip(pts, pts[1:]) if q > p]
    share = abs_tol / len(pieces)
    runs = [_adaptive(g, p, q, share, rel_tol) for p, q in pieces]
    results = [r for r, _ in runs]
    value = math.fsum(r.value for r in results)
    err = sum(r.err_est for r in results)
    ok = err <= max(abs_tol, rel_tol * sum(m for _, m in runs))
    if not ok:
        warnings.warn(
            f"oracle integration on [{a}, {b}] stopped at err_est={err:.3e} (abs_tol={abs_tol:.3e})",
            OracleWarning,
            stacklevel=2,
        )
    return Quad(value, err, ok)


def _golden(h: Callable[[float], float], lo: float, hi: float, steps: int) -> tuple[float, float]:
    """Maximise ``h`` on [lo, hi] by golden-section; returns (argmax, max)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    hc, hd = h(c), h(d)
    for _ in range(steps):
        if hc > hd:
            hi, d, hd = d, c, hc
            c = hi - invphi * (hi - lo)
            hc = h(c)
        else:
            lo, c, hc = c, d, hd
            d = lo + invphi * (hi - lo)
            hd = h(d)
    return (c, hc) if hc > hd else (d, hd)


def _refined_max(h: Callable, a: float, b: float, points: int) -> float:
    t = np.linspace(a, b, points)
    vals = _evaluate(h, t)
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, points - 1)]
    if hi > lo:
        _, refined = _golden(lambda s: float(h(np.array([s]))[0]), lo, hi, GOLDEN_STEPS)
        best = max(best, refined)
    return best


def grid_sup(g: Callable, a, b=None, points: int = GRID_POINTS) -> float:
    """sup |g| on [a, b] (or an Interval): uniform grid, then golden-section around the best cell."""
    a, b, points = _span(a, b, points)
    return _refined_max(lambda t: np.abs(_evaluate(g, np.atleast_1d(t))), a, b, points)


def grid_extrema(g: Callable, a, b=None, points: int = GRID_POINTS) -> tuple[float, float]:
    """(min g, max g) on [a, b] with the same grid-and-refine strategy."""
    a, b, points = _span(a, b, points)
    hi = _refined_max(lambda t: _evaluate(g, np.atleast_1d(t)), a, b, points)
    lo = -_refined_max(lambda t: -_evaluate(g, np.atleast_1d(t)), a, b, points)
    return lo, hi


def fd_derivative_check(f, k: int, samples: int = 16, step: float = 1e-5,
                        a: float = 0.0, b: float = 1.0, seed: int = 0) -> float:
    """Worst relative error between f^(k) and a central difference of f^(k-1).

    The error is measured as ``|fd - exact| / (1 + |exact|)``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    t = rng.uniform(a + step, b - step, size=samples)
    fd = (f.value_at(k - 1, t + step) - f.value_at(k - 1, t - step)) / (2 * step)
    exact = f.value_at(k, t)
    return float(np.max(np.abs(fd - exact) / (1.0 + np.abs(exact))))
