import pytest

from twopoint import verify as vf
from twopoint.kernels import Interval, NodeTriple, tampered_kernel


def test_random_triples_reproducible():
    iv = Interval(-1.0, 2.0)
    a = vf.random_triples(5, iv, 4)
    assert a == vf.random_triples(5, iv, 4)
    for t in a:
        t.check(iv)


def test_gs_points():
    assert vf.gs_points(Interval(0.0, 1.0)) == (0.0, 0.25, 0.5)


@pytest.mark.parametrize("suite", vf.SUITES)
def test_suites_pass_in_derived_form(suite):
    results = list(vf.run_suite(suite, 0, 24, "derived"))
    assert len(results) == 24
    assert all(r.ok for r in results), [r.line() for r in results if not r.ok]


def test_grid_configs_cover_grid():
    grid = list(range(10))
    assert sorted(vf._grid_configs(1, 10, grid)) == grid


@pytest.mark.parametrize("suite", ["expansion", "fink"])
def test_tamper_breaks_suites(suite):
    with tampered_kernel():
        assert not all(r.ok for r in vf.run_suite(suite, 0, 10))
    assert all(r.ok for r in vf.run_suite(suite, 0, 10))


def test_unknown_names():
    with pytest.raises(ValueError):
        vf.run_suite("nope", 0, 1)
    from twopoint.testlib import NormSpec, get_function
    with pytest.raises(ValueError):
        vf.evaluate_bound("nope", get_function("exp"), 1, NormSpec(1.0), NodeTriple(0.2, 0.5, 0.7), Interval(0.0, 1.0))


def test_is_symmetric():
    iv = Interval(-1.0, 2.0)
    assert vf.is_symmetric(NodeTriple(-0.5, 0.5, 1.5), iv)
    assert not vf.is_symmetric(NodeTriple(-0.5, 0.4, 1.5), iv)


def test_case_line_format():
    r = vf.CaseResult("fink", "cfg", 1e-3, 0.0)
    assert not r.ok and "FAIL" in r.line()
