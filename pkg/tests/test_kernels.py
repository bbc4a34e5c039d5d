import math

import numpy as np
import pytest
from scipy import integrate as spi

from twopoint import oracle
from twopoint.kernels import (
    Interval,
    NodeTriple,
    abs_moment_S,
    eval_GS,
    eval_K,
    eval_S,
    gs_nodes,
    lq_norm_S,
    moment_S,
    q_moment_S,
    sup_abs_K,
    sup_abs_S,
    tampered_kernel,
)

from conftest import UNIT, WIDE, random_nodes


def scipy_int(g, iv, nodes):
    pts = sorted(set(nodes.as_list()) - {iv.a, iv.b})
    return spi.quad(g, iv.a, iv.b, points=pts or None, epsabs=1e-13, epsrel=1e-13, limit=200)[0]


@pytest.mark.parametrize("n, nodes, t, expected", [
    (1, (0.5, 0.5, 0.5), 0.25, 0.25),
    (2, (0.0, 0.5, 1.0), 0.75, 0.03125),
    (1, (0.25, 0.5, 0.75), 0.9, -0.1),
])
def test_eval_S_examples(n, nodes, t, expected):
    assert eval_S(n, t, NodeTriple(*nodes), UNIT) == pytest.approx(expected, abs=1e-15)


def test_eval_S_breakpoint_precedence():
    nodes = NodeTriple(0.25, 0.5, 0.75)
    assert eval_S(1, 0.25, nodes, UNIT) == 0.25
    assert eval_S(1, 0.75, nodes, UNIT) == -0.25


def test_eval_S_rejects_outside_points():
    with pytest.raises(ValueError):
        eval_S(1, 1.5, NodeTriple(0.2, 0.5, 0.8), UNIT)
    with pytest.raises(ValueError):
        eval_S(1, 0.5, NodeTriple(0.6, 0.5, 0.8), UNIT)


def test_eval_K_examples(rng):
    assert eval_K(0.5, NodeTriple(0.25, 0.5, 0.75), UNIT) == 0
    assert eval_K(0.3, NodeTriple(0.0, 0.5, 1.0), UNIT) == pytest.approx(-0.2)
    for _ in range(20):
        nodes = random_nodes(rng, UNIT)
        t = rng.uniform(0, 1)
        assert abs(eval_K(t, nodes, UNIT) - eval_S(1, t, nodes, UNIT)) <= 1e-15


def test_eval_GS(rng):
    assert eval_GS(0.5, 0.25, UNIT) == 0
    assert eval_GS(0.1, 0.25, UNIT) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        eval_GS(0.1, 0.7, UNIT)
    for _ in range(20):
        x = rng.uniform(0, 0.5)
        t = rng.uniform(0, 1)
        if min(abs(t - x), abs(t - (1 - x))) < 1e-9:
            continue
        assert abs(eval_GS(t, x, UNIT) + eval_GS(1 - t, x, UNIT)) <= 1e-15


def test_gs_nodes():
    assert gs_nodes(0.25, UNIT) == NodeTriple(0.25, 0.5, 0.75)
    with pytest.raises(ValueError):
        gs_nodes(-0.1, UNIT)


def test_n1_kernel_is_ostrowski_kernel(rng):
    # collapsed nodes (x, x, x): t - a left of x, t - b right of it
    for _ in range(10):
        x, t = rng.uniform(0, 1, 2)
        expected = t if t <= x else t - 1
        assert eval_S(1, t, NodeTriple(x, x, x), UNIT) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("fn, args, expected", [
    (moment_S, (1, NodeTriple(0.5, 0.5, 0.5)), 0.0),
    (moment_S, (2, NodeTriple(0.0, 0.5, 1.0)), 1 / 24),
    (moment_S, (1, NodeTriple(0.0, 0.5, 1.0)), 0.0),
    (abs_moment_S, (1, NodeTriple(0.5, 0.5, 0.5)), 0.25),
    (abs_moment_S, (2, NodeTriple(0.0, 0.5, 1.0)), 1 / 24),
    (abs_moment_S, (1, NodeTriple(0.0, 0.0, 0.0)), 0.5),
    (sup_abs_S, (1, NodeTriple(0.25, 0.5, 0.75)), 0.25),
    (sup_abs_S, (2, NodeTriple(0.0, 0.5, 1.0)), 0.125),
    (sup_abs_S, (1, NodeTriple(0.0, 0.0, 0.0)), 1.0),
])
def test_closed_form_examples(fn, args, expected):
    assert fn(*args, UNIT) == pytest.approx(expected, abs=1e-15)


def test_q_moment_examples(rng):
    assert q_moment_S(1, 2, NodeTriple(0.5, 0.5, 0.5), UNIT) == pytest.approx(0.25 / 3, abs=1e-15)
    nodes = NodeTriple(0.0, 0.5, 1.0)
    ref = scipy_int(lambda t: abs(eval_S(2, t, nodes, UNIT)) ** 1.5, UNIT, nodes)
    assert q_moment_S(2, 1.5, nodes, UNIT) == pytest.approx(ref, abs=1e-10)
    for _ in range(10):
        nodes = random_nodes(rng, WIDE)
        n = int(rng.integers(1, 5))
        assert abs(q_moment_S(n, 1, nodes, WIDE) - abs_moment_S(n, nodes, WIDE)) <= 1e-14
    with pytest.raises(ValueError):
        q_moment_S(1, 0.5, nodes, WIDE)


def test_sup_abs_K_examples(rng):
    assert sup_abs_K(NodeTriple(0.25, 0.5, 0.75), UNIT) == 0.25
    assert sup_abs_K(NodeTriple(0.0, 0.5, 1.0), UNIT) == 0.5
    for _ in range(10):
        nodes = random_nodes(rng, UNIT)
        assert sup_abs_K(nodes, UNIT) == pytest.approx(sup_abs_S(1, nodes, UNIT), abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_moments_against_scipy(n, iv, rng):
    for _ in range(8):
        nodes = random_nodes(rng, iv)
        S = lambda t: eval_S(n, t, nodes, iv)
        assert moment_S(n, nodes, iv) == pytest.approx(scipy_int(S, iv, nodes), abs=1e-10)
        assert abs_moment_S(n, nodes, iv) == pytest.approx(scipy_int(lambda t: abs(S(t)), iv, nodes), abs=1e-10)
        for q in (2.0, 3.0):
            ref = scipy_int(lambda t: abs(S(t)) ** q, iv, nodes)
            assert q_moment_S(n, q, nodes, iv) == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_sup_against_grid(n, iv, rng):
    for _ in range(8):
        nodes = random_nodes(rng, iv)
        g = lambda t: eval_S(n, t, nodes, iv)
        # include the open-side limits at the jumps
        eps = 1e-13
        edge = np.clip([nodes.y + eps, nodes.z - eps], iv.a, iv.b)
        grid = max(oracle.grid_sup(g, iv.a, iv.b), float(np.max(np.abs(g(edge)))))
        assert sup_abs_S(n, nodes, iv) == pytest.approx(grid, abs=1e-8)


def test_lq_norm_inf_is_sup():
    nodes = NodeTriple(0.1, 0.4, 0.8)
    assert lq_norm_S(2, math.inf, nodes, UNIT) == sup_abs_S(2, nodes, UNIT)
    assert lq_norm_S(2, 2, nodes, UNIT) == pytest.approx(q_moment_S(2, 2, nodes, UNIT) ** 0.5)


def test_tampered_kernel_flips_sign_and_restores():
    nodes = NodeTriple(0.25, 0.5, 0.75)
    with tampered_kernel():
        assert eval_S(1, 0.1, nodes, UNIT) == pytest.approx(-0.1)
    assert eval_S(1, 0.1, nodes, UNIT) == pytest.approx(0.1)


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)
    with pytest.raises(ValueError):
        Interval(0.0, math.inf)
    assert WIDE.length == 3 and WIDE.mid == 0.5
