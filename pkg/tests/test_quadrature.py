import math

import numpy as np
import pytest
from scipy import integrate as spi

from twopoint.kernels import NodeTriple
from twopoint.quadrature import (
    composite_integrate,
    correction_sum,
    expand,
    generalized_taylor,
    mean_value_bracket,
    mean_value_eta,
    reference_integral,
    remainder_numeric,
    rule_value,
)
from twopoint.testlib import STANDARD_FUNCTIONS, get_function, polynomial_function

from conftest import UNIT, WIDE, random_nodes


def test_rule_value_example():
    f = get_function("poly:0,0,1")
    assert rule_value(f, NodeTriple(0.0, 0.5, 1.0), UNIT) == pytest.approx(0.5)


def test_correction_empty_at_n1():
    assert correction_sum(get_function("exp"), 1, NodeTriple(0.2, 0.4, 0.9), UNIT) == 0.0


def test_n1_collapsed_is_ostrowski():
    # rule = (b-a) f(x) at collapsed nodes; remainder is the Ostrowski kernel integral
    f = get_function("exp")
    nodes = NodeTriple(0.3, 0.3, 0.3)
    res = expand(f, 1, nodes, UNIT)
    assert res.approx == pytest.approx(math.exp(0.3))
    assert res.ok


@pytest.mark.parametrize("name", STANDARD_FUNCTIONS)
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_expansion_identity(name, n, iv, rng):
    f = get_function(name)
    for _ in range(4):
        res = expand(f, n, random_nodes(rng, iv), iv)
        assert res.identity_residual <= 1e-8 * (1 + abs(res.reference))


def test_reference_integral_matches_scipy(iv):
    f = get_function("runge")
    assert reference_integral(f, iv) == pytest.approx(spi.quad(f, iv.a, iv.b)[0], abs=1e-12)


def test_remainder_of_low_degree_polynomial_vanishes(rng):
    # f^(n) = 0 for degree < n
    f = polynomial_function([1.0, -2.0, 0.5])
    for n in (3, 4):
        assert remainder_numeric(f, n, random_nodes(rng, WIDE), WIDE) == 0.0


def test_remainder_matches_scipy(rng):
    f = get_function("exp")
    nodes = random_nodes(rng, WIDE)
    n = 3
    ref = spi.quad(f, WIDE.a, WIDE.b)[0]
    direct = rule_value(f, nodes, WIDE) - ref - correction_sum(f, n, nodes, WIDE)
    assert remainder_numeric(f, n, nodes, WIDE) == pytest.approx(direct, abs=1e-12)


@pytest.mark.parametrize("name", ["exp", "sin", "runge"])
def test_generalized_taylor_recovers_f_at_z(name, rng):
    f = get_function(name)
    for n in (1, 2, 4):
        y, x, z = np.sort(rng.uniform(-1, 2, 3))
        assert generalized_taylor(f, n, y, x, z) == pytest.approx(float(f(z)), abs=1e-12)
    with pytest.raises(ValueError):
        generalized_taylor(f, 1, 0.5, 0.2, 0.9)


def test_mean_value_eta_lies_in_range(rng):
    f = get_function("exp")
    for n in (1, 2):
        nodes = random_nodes(rng, UNIT)
        eta_val = mean_value_eta(f, n, nodes, UNIT)
        assert 1.0 - 1e-9 <= eta_val <= math.e + 1e-9
    assert mean_value_bracket(1, NodeTriple(0.0, 0.5, 1.0), UNIT) == pytest.approx(2 * 0.5**3)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("pattern", [(0.25, 0.5, 0.75), (0.1, 0.3, 0.85)])
def test_composite_exact_up_to_degree_2n_minus_1(n, pattern):
    nodes = NodeTriple(*pattern)
    for deg in range(2 * n):
        f = polynomial_function([0.0] * deg + [1.0])
        exact = (WIDE.b ** (deg + 1) - WIDE.a ** (deg + 1)) / (deg + 1)
        assert composite_integrate(f, n, 5, nodes, WIDE) == pytest.approx(exact, abs=1e-10)


def test_composite_converges():
    f = get_function("exp")
    errs = [abs(composite_integrate(f, 1, m, NodeTriple(0.25, 0.5, 0.75), UNIT) - (math.e - 1))
            for m in (8, 16)]
    assert errs[1] < errs[0] / 3.5
    with pytest.raises(ValueError):
        composite_integrate(f, 1, 0, NodeTriple(0.25, 0.5, 0.75), UNIT)


def test_insufficient_derivatives_rejected():
    f = get_function("exp")
    with pytest.raises(ValueError):
        remainder_numeric(f, 9, NodeTriple(0.2, 0.5, 0.8), UNIT)
    with pytest.raises(ValueError):
        correction_sum(f, 0, NodeTriple(0.2, 0.5, 0.8), UNIT)


@pytest.mark.parametrize("name", STANDARD_FUNCTIONS)
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_generalized_taylor_relative(name, n, rng):
    f = get_function(name)
    for _ in range(3):
        y, x, z = np.sort(rng.uniform(-1, 2, 3))
        assert abs(generalized_taylor(f, n, y, x, z) - float(f(z))) <= 1e-9 * abs(float(f(z))) + 1e-14


@pytest.mark.parametrize("name", STANDARD_FUNCTIONS)
def test_mean_value_eta_within_extrema(name, iv, rng):
    from twopoint.testlib import extrema

    f = get_function(name)
    for n in (1, 2, 3):
        lo, hi = extrema(f, 2 * n, iv)
        for _ in range(3):
            nodes = random_nodes(rng, iv)
            eta_val = mean_value_eta(f, n, nodes, iv)
            slack = 1e-8 * (1 + max(abs(lo), abs(hi)))
            assert lo - slack <= eta_val <= hi + slack
