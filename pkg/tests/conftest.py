import warnings

import pytest

from mtproduct.choquard import build_riesz
from mtproduct.kcs import make_problem, solve
from mtproduct.radial import make_grid


@pytest.fixture(scope="session")
def grid():
    return make_grid()


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(node_count=64, grading=1.0)


@pytest.fixture(scope="session")
def riesz21(grid):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return build_riesz(1.0, 2, grid)


@pytest.fixture(scope="session")
def benchmark():
    """Default problem: n = 2, mu = 1, m = 1 (d0 = 1, d1 = 0), uniform 512-node grid."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return make_problem()


@pytest.fixture(scope="session")
def benchmark_state(benchmark):
    return solve(benchmark)


@pytest.fixture(scope="session")
def degenerate():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return make_problem(d0=0.0, d1=1.0, beta=0.5)


@pytest.fixture(scope="session")
def small_problem():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return make_problem(node_count=48)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
