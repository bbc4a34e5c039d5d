"""Seeded sweeps: identity-residual suites and bound evaluation on one configuration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import bounds as bd
from . import fink, gruss
from .algebra import offset_appell_sequence, shifted_monomial_sequence
from .kernels import Interval, NodeTriple
from .quadrature import IDENTITY_TOL, expand, remainder_numeric
from .testlib import (
    STANDARD_FUNCTIONS,
    HolderSpec,
    NormSpec,
    TestFunction,
    get_function,
    holder_estimate,
    lp_norm,
    p_variation,
)

SWEEP_INTERVALS = (Interval(0.0, 1.0), Interval(-1.0, 2.0))
SUITES = ("expansion", "fink", "gs", "gruss")
BOUND_KINDS = ("variation", "lp", "holder", "gamma", "fink", "fink-factored", "gs")


def random_triple(rng: np.random.Generator, iv: Interval) -> NodeTriple:
    y, x, z = np.sort(rng.uniform(iv.a, iv.b, 3))
    return NodeTriple(float(y), float(x), float(z))


def random_triples(seed: int, iv: Interval, count: int) -> list[NodeTriple]:
    rng = np.random.default_rng(seed)
    return [random_triple(rng, iv) for _ in range(count)]


def gs_points(iv: Interval) -> tuple[float, float, float]:
    return (iv.a, (3 * iv.a + iv.b) / 4, iv.mid)


@dataclass(frozen=True)
class CaseResult:
    suite: str
    label: str
    residual: float
    scale: float

    @property
    def tol(self) -> float:
        return IDENTITY_TOL * (1 + self.scale)

    @property
    def ok(self) -> bool:
        return bool(self.residual <= self.tol)

    def line(self) -> str:
        flag = "ok" if self.ok else "FAIL"
        return f"{self.suite:9s} {flag:4s} residual={self.residual:.3e} tol={self.tol:.1e}  {self.label}"


def _fmt_nodes(nodes: NodeTriple) -> str:
    return ",".join(f"{v:.17g}" for v in nodes.as_list())


def _configs(seed: int, trials: int):
    """Deterministic stream of (function, interval, rng) cycling over the registry."""
    rng = np.random.default_rng(seed)
    cycle = itertools.cycle(itertools.product(STANDARD_FUNCTIONS, SWEEP_INTERVALS))
    for _ in range(trials):
        name, iv = next(cycle)
        yield get_function(name), iv, rng


def suite_expansion(seed: int, trials: int) -> Iterator[CaseResult]:
    for i, (f, iv, rng) in enumerate(_configs(seed, trials)):
        n = 1 + i % 5
        nodes = random_triple(rng, iv)
        res = expand(f, n, nodes, iv)
        yield CaseResult("expansion", f"fn={f.name} iv=[{iv.a:g},{iv.b:g}] n={n} nodes={_fmt_nodes(nodes)}",
                         res.identity_residual, abs(res.reference))


def fink_sequences(iv: Interval, nodes: NodeTriple, m: int):
    for tag, alpha in (("a", iv.a), ("x", nodes.x), ("mid", iv.mid), ("b", iv.b)):
        yield f"alpha={tag}", shifted_monomial_sequence(alpha, m)
    yield "offset", offset_appell_sequence(m)


def suite_fink(seed: int, trials: int) -> Iterator[CaseResult]:
    for i, (f, iv, rng) in enumerate(_configs(seed, trials)):
        n = 1 + i % 5
        nodes = random_triple(rng, iv)
        tag, seq = list(fink_sequences(iv, nodes, n - 1))[i % 5]
        ctx = fink.FinkContext(seq, n, nodes, iv)
        resid, mean = fink.fink_residual(ctx, f)
        G, E = fink.fink_quadrature(ctx, f)
        ref = mean * iv.length
        label = f"fn={f.name} iv=[{iv.a:g},{iv.b:g}] n={n} seq={tag} nodes={_fmt_nodes(nodes)}"
        yield CaseResult("fink", label, max(resid, abs(ref - G - E) / iv.length), mean)


def _grid_configs(seed: int, trials: int, grid: list) -> list:
    """Seeded permutation of a finite grid, repeated as needed to reach ``trials``."""
    order = np.random.default_rng(seed).permutation(len(grid))
    return [grid[order[i % len(grid)]] for i in range(trials)]


def suite_gs(seed: int, trials: int, form: str = "printed") -> Iterator[CaseResult]:
    grid = [(name, iv, n, j) for name in STANDARD_FUNCTIONS for iv in SWEEP_INTERVALS
            for n in range(1, 5) for j in range(3)]
    for name, iv, n, j in _grid_configs(seed, trials, grid):
        f, x = get_function(name), gs_points(iv)[j]
        resid = fink.gs_identity_residual(x, n, f, iv, form)
        mean = abs(f.exact_integral(iv)) / iv.length
        yield CaseResult("gs", f"fn={name} iv=[{iv.a:g},{iv.b:g}] n={n} x={x:g} form={form}", resid, mean)


def gruss_case(kind: str, f: TestFunction, x: float, n: int, iv: Interval, form: str = "printed") -> tuple[float, float]:
    """(functional, Chebyshev functional of its pairing) for kind P, Q or L."""
    if kind == "P":
        return gruss.P_functional(f, x, n, iv, form), gruss.chebyshev_T(gruss.P_pair(f, x, n, iv), iv)
    if kind == "Q":
        return gruss.Q_functional(f, x, n, iv, form), gruss.chebyshev_T(gruss.Q_pair(f, x, n, iv), iv)
    if kind == "L":
        ctx = fink.FinkContext(shifted_monomial_sequence(x, n + 1), n, NodeTriple(x, iv.mid, iv.a + iv.b - x), iv)
        return gruss.L_functional(ctx, f, x), gruss.chebyshev_T(gruss.L_pair(ctx, f, x), iv)
    raise ValueError(f"unknown pairing {kind!r}")


def suite_gruss(seed: int, trials: int, form: str = "printed") -> Iterator[CaseResult]:
    grid = [(name, iv, n, j, kind) for name in STANDARD_FUNCTIONS for iv in SWEEP_INTERVALS
            for n in range(1, 4) for j in range(3) for kind in "PQL"]
    for name, iv, n, j, kind in _grid_configs(seed, trials, grid):
        f, x = get_function(name), gs_points(iv)[j]
        val, T = gruss_case(kind, f, x, n, iv, form)
        label = f"fn={name} iv=[{iv.a:g},{iv.b:g}] n={n} x={x:g} pairing={kind}"
        if kind != "L":
            label += f" form={form}"
        yield CaseResult("gruss", label, abs(val - T), abs(T))


def run_suite(name: str, seed: int, trials: int, form: str = "printed") -> Iterator[CaseResult]:
    if name == "expansion":
        return suite_expansion(seed, trials)
    if name == "fink":
        return suite_fink(seed, trials)
    if name == "gs":
        return suite_gs(seed, trials, form)
    if name == "gruss":
        return suite_gruss(seed, trials, form)
    raise ValueError(f"unknown suite {name!r}")


# --- single-configuration bound evaluation ---------------------------------------

def is_symmetric(nodes: NodeTriple, iv: Interval, tol: float = 1e-12) -> bool:
    scale = tol * max(1.0, abs(iv.a), abs(iv.b))
    return abs(nodes.x - iv.mid) <= scale and abs(nodes.y + nodes.z - iv.a - iv.b) <= scale


def evaluate_bound(which: str, f: TestFunction, n: int, p: NormSpec, nodes: NodeTriple, iv: Interval,
                   t0: float | None = None, r: float = 1.0, H: float | None = None,
                   alpha: float | None = None) -> bd.BoundReport:
    """Bound and matching remainder for one configuration.

    ``holder`` and ``gamma`` estimate H from samples of f^(n-1) when it is not given
    and flag the report accordingly.
    """
    nodes.check(iv)
    estimated = False
    if which == "variation":
        rem = abs(remainder_numeric(f, n, nodes, iv))
        bound = bd.bound_variation(n, p, nodes, iv, p_variation(f, n - 1, p, iv))
    elif which == "lp":
        rem = abs(remainder_numeric(f, n, nodes, iv))
        bound = bd.bound_lp(n, p, nodes, iv, lp_norm(f, n, p, iv))
    elif which in ("holder", "gamma"):
        if H is None:
            H, estimated = holder_estimate(f, n - 1, r, iv), True
        spec = HolderSpec(r, H)
        if which == "holder":
            t0 = nodes.x if t0 is None else t0
            rem = abs(bd.tilde_remainder(n, t0, nodes, iv, f))
            bound = bd.bound_holder(n, spec, nodes, iv, t0, p)
        else:
            nodes = NodeTriple(nodes.x, nodes.x, nodes.x)
            rem = abs(remainder_numeric(f, n, nodes, iv))
            bound = bd.bound_holder_collapsed(n, spec, nodes.x, iv)
    elif which in ("fink", "fink-factored"):
        ctx = fink.monomial_context(nodes.x if alpha is None else alpha, n, nodes, iv)
        rem = abs(bd.fink_error(ctx, f))
        normval = lp_norm(f, n, p, iv)
        fn = bd.bound_fink if which == "fink" else bd.bound_fink_factored
        bound = fn(n, p, ctx, normval)
    elif which == "gs":
        if not is_symmetric(nodes, iv) or nodes.y > iv.mid:
            raise ValueError("gs bound needs nodes (h, (a+b)/2, a+b-h)")
        rem = abs(fink.gs_kernel_integral(nodes.y, n, f, iv))
        bound = bd.gs_sharp_constant(n, p, nodes.y, iv) * lp_norm(f, n, p, iv)
    else:
        raise ValueError(f"unknown bound {which!r}; choose from {BOUND_KINDS}")
    return bd.BoundReport(which, n, p, nodes, iv, bound, rem, estimated)
