import numpy as np
import pytest

from mtproduct.checks import SUITES, random_bump, random_profile, run_suite


@pytest.mark.parametrize("name,trials", [("holder", 10), ("young", 200), ("scaling", 3), ("lions", 1)])
def test_suites_pass_small(name, trials):
    rep = run_suite(name, seed=1, trials=trials)
    assert rep.passed, rep.failures
    assert rep.trials == trials
    assert set(rep.as_dict()) == {"suite", "seed", "trials", "passed", "summary", "failures"}


def test_hls_suite_small():
    rep = run_suite("hls", seed=2, trials=5)
    assert rep.passed
    assert all(v <= 1.0 for v in rep.summary.values())


def test_suite_deterministic():
    a = run_suite("young", seed=7, trials=50)
    b = run_suite("young", seed=7, trials=50)
    assert a.summary == b.summary


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_bad_trials():
    with pytest.raises(ValueError):
        run_suite("young", trials=0)


def test_default_trials():
    assert {k: v[1] for k, v in SUITES.items()} == {
        "holder": 100, "young": 1000, "scaling": 20, "hls": 200, "lions": 5}


def test_random_helpers():
    rng = np.random.default_rng(0)
    p = random_profile(rng, 2.0)
    assert p(2.0) == 0.0
    nodes = np.linspace(0, 1, 50)
    b = random_bump(rng, nodes)
    assert np.all(b >= 0) and b.shape == nodes.shape
