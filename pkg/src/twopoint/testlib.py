"""Test functions with analytic derivatives, plus norms, variations and extrema."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import oracle
from .algebra import Polynomial, poly_diff
from .kernels import Interval

MAX_ORDER = 8
HOLDER_PAIRS = 10_000
HOLDER_SAFETY = 1.05


@dataclass(frozen=True)
class TestFunction:
    """A function together with its derivatives ``deriv(k, t)`` for k <= max_order."""

    __test__ = False  # not a pytest class

    name: str
    max_order: int
    deriv: Callable[[int, np.ndarray], np.ndarray]
    integral: Optional[Callable[[Interval], float]] = None

    def value_at(self, k: int, t):
        if not 0 <= k <= self.max_order:
            raise ValueError(f"{self.name}: derivative order {k} outside 0..{self.max_order}")
        return self.deriv(k, t)

    def exact_integral(self, iv: Interval) -> Optional[float]:
        return None if self.integral is None else self.integral(iv)

    def __call__(self, t):
        return self.deriv(0, t)


@dataclass(frozen=True)
class NormSpec:
    p: float

    def __post_init__(self):
        if not (self.p >= 1):
            raise ValueError(f"p must lie in [1, inf], got {self.p}")

    @classmethod
    def parse(cls, text) -> "NormSpec":
        if isinstance(text, str) and text.strip().lower() in {"inf", "infinity", "∞"}:
            return cls(math.inf)
        return cls(float(text))

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.p)

    @property
    def conjugate(self) -> float:
        if self.p == 1:
            return math.inf
        if self.is_inf:
            return 1.0
        return self.p / (self.p - 1)

    def label(self) -> str:
        return "inf" if self.is_inf else f"{self.p:g}"


@dataclass(frozen=True)
class HolderSpec:
    r: float
    H: float

    def __post_init__(self):
        if not 0 < self.r <= 1:
            raise ValueError(f"Hölder exponent must lie in (0, 1], got {self.r}")
        if self.H < 0:
            raise ValueError(f"Hölder constant must be nonnegative, got {self.H}")


def polynomial_function(coeffs, name: str | None = None) -> TestFunction:
    chain = [Polynomial(coeffs)]
    for _ in range(MAX_ORDER):
        chain.append(poly_diff(chain[-1]))

    def deriv(k, t):
        out = chain[k](np.asarray(t, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    label = name or "poly:" + ",".join(f"{c:g}" for c in chain[0].coeffs)
    return TestFunction(label, MAX_ORDER, deriv, lambda iv: chain[0].integral(iv.a, iv.b))


def _exp_deriv(k, t):
    return np.exp(t)


def _trig(phase0: float):
    def deriv(k, t):
        return np.sin(np.asarray(t, dtype=float) + phase0 + k * math.pi / 2)
    return deriv


def _runge_deriv(k, t):
    # d^k/dt^k Im[1/(t - i)] = Im[(-1)^k k! (t - i)^{-(k+1)}]
    w = np.asarray(t, dtype=float) - 1j
    out = ((-1) ** k * math.factorial(k) * w ** (-(k + 1))).imag
    return float(out) if np.ndim(out) == 0 else out


OCTIC = (1.0, -2.0, 0.5, 1.0, -0.75, 0.3, 0.2, -0.1, 0.05)

_REGISTRY: dict[str, TestFunction] = {
    "exp": TestFunction("exp", MAX_ORDER, _exp_deriv, lambda iv: math.exp(iv.b) - math.exp(iv.a)),
    "sin": TestFunction("sin", MAX_ORDER, _trig(0.0), lambda iv: math.cos(iv.a) - math.cos(iv.b)),
    "cos": TestFunction("cos", MAX_ORDER, _trig(math.pi / 2), lambda iv: math.sin(iv.b) - math.sin(iv.a)),
    "runge": TestFunction("runge", MAX_ORDER, _runge_deriv, lambda iv: math.atan(iv.b) - math.atan(iv.a)),
    "cubic": polynomial_function((1.0, 0.0, -3.0, 2.0), "cubic"),
    "octic": polynomial_function(OCTIC, "octic"),
}

STANDARD_FUNCTIONS = ("exp", "sin", "cos", "runge", "cubic", "octic")


def get_function(name: str) -> TestFunction:
    """Look up a registry entry, or build ``poly:c0,c1,...`` (ascending coefficients)."""
    key = name.strip()
    if key.startswith("poly:"):
        body = key[5:].replace("−", "-")
        try:
            coeffs = [float(c) for c in body.split(",") if c.strip()]
        except ValueError as exc:
            raise ValueError(f"bad polynomial literal {name!r}") from exc
        if not coeffs:
            raise ValueError(f"empty polynomial literal {name!r}")
        return polynomial_function(coeffs)
    try:
        return _REGISTRY[key]
    except KeyError:
        raise ValueError(f"unknown function {name!r}; known: {sorted(_REGISTRY)} or poly:...") from None


def registry_names() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def _deriv_handle(f: TestFunction, k: int):
    if k > f.max_order:
        raise ValueError(f"{f.name}: derivative order {k} exceeds max_order {f.max_order}")
    return lambda t: f.value_at(k, t)


def lp_norm(f: TestFunction, k: int, p: NormSpec, iv: Interval, breakpoints=()) -> float:
    """||f^(k)||_p on iv; pass ``breakpoints`` where f^(k) jumps or kinks."""
    g = _deriv_handle(f, k)
    if p.is_inf:
        sup = oracle.grid_sup(g, iv.a, iv.b)
        pts = np.array([c for c in breakpoints if iv.a <= c <= iv.b], dtype=float)
        if pts.size:
            h = 1e-12 * iv.length
            edge = np.clip(np.concatenate([pts - h, pts, pts + h]), iv.a, iv.b)
            sup = max(sup, float(np.max(np.abs(g(edge)))))
        return sup
    val = oracle.integrate(lambda t: np.abs(g(t)) ** p.p, iv.a, iv.b, breakpoints=breakpoints).value
    return max(val, 0.0) ** (1.0 / p.p)


def extrema(f: TestFunction, k: int, iv: Interval) -> tuple[float, float]:
    return oracle.grid_extrema(_deriv_handle(f, k), iv.a, iv.b)


def p_variation(f: TestFunction, k: int, p: NormSpec, iv: Interval) -> float:
    """Variation of f^(k) via its derivative; oscillation when p is infinite."""
    if k + 1 > f.max_order:
        raise ValueError(f"{f.name}: p-variation of order {k} needs derivative {k + 1}")
    if p.is_inf:
        lo, hi = extrema(f, k, iv)
        return hi - lo
    return lp_norm(f, k + 1, p, iv)


def holder_estimate(f: TestFunction, k: int, r: float, iv: Interval, seed: int = 0) -> float:
    """Sampled Hölder constant of f^(k), inflated by 5 %. An estimate, not a certificate."""
    if not 0 < r <= 1:
        raise ValueError(f"r must lie in (0, 1], got {r}")
    rng = np.random.default_rng(seed)
    s = rng.uniform(iv.a, iv.b, HOLDER_PAIRS)
    sep = iv.length * 10.0 ** rng.uniform(-6, 0, HOLDER_PAIRS)
    t = np.clip(s + rng.choice((-1.0, 1.0), HOLDER_PAIRS) * sep, iv.a, iv.b)
    keep = t != s
    s, t = s[keep], t[keep]
    g = _deriv_handle(f, k)
    ratios = np.abs(g(s) - g(t)) / np.abs(s - t) ** r
    return HOLDER_SAFETY * float(np.max(ratios, initial=0.0))
