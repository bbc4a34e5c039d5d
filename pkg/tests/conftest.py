import numpy as np
import pytest
from hypothesis import settings

from twopoint.kernels import Interval, NodeTriple

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

UNIT = Interval(0.0, 1.0)
WIDE = Interval(-1.0, 2.0)


def random_nodes(rng: np.random.Generator, iv: Interval) -> NodeTriple:
    y, x, z = np.sort(rng.uniform(iv.a, iv.b, 3))
    return NodeTriple(float(y), float(x), float(z))


@pytest.fixture(params=[UNIT, WIDE], ids=["unit", "wide"])
def iv(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
