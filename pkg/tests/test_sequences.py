import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtproduct.radial import dirichlet_seminorm, make_grid, pair_norm
from mtproduct.sequences import MoserParams, adams_capacity_bound, moser_fn, product_pair_sequence
from mtproduct.special import DimensionParams, sphere_area


@pytest.mark.parametrize("k", [4, 16, 64, 256, 1e6])
def test_moser_unit_seminorm(grid, k):
    assert dirichlet_seminorm(moser_fn(MoserParams(k, 1.0)), 2, grid) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("n", [3, 4])
def test_moser_unit_seminorm_higher_dimension(n):
    grid = make_grid()
    assert dirichlet_seminorm(moser_fn(MoserParams(50, 0.5, n, 1.0)), n, grid) == pytest.approx(1.0, abs=1e-10)


def test_plateau_value():
    w = moser_fn(MoserParams(16, 1.0))
    ref = sphere_area(2) ** -0.5 * math.log(16) ** 0.5
    assert w(np.array([0.0, 1 / 32]))[0] == pytest.approx(ref)
    assert w(np.array([1.0, 1.5])).tolist() == [0.0, 0.0]


@settings(max_examples=25, deadline=None)
@given(st.floats(2.0, 1e4), st.floats(0.05, 1.0))
def test_pair_norm_is_one(k, rho):
    p = product_pair_sequence(MoserParams(k, rho, 2, 1.0))
    assert pair_norm(p, "Y", make_grid()) == pytest.approx(1.0, abs=1e-9)


def test_params_validation():
    with pytest.raises(ValueError):
        MoserParams(1.5, 1.0)
    with pytest.raises(ValueError):
        MoserParams(4, 2.0, 2, 1.0)


def test_capacity_bound_monotone():
    d = DimensionParams(2, 1)
    assert adams_capacity_bound(0.1, d) < adams_capacity_bound(0.5, d)
    assert adams_capacity_bound(math.exp(-1), d) == pytest.approx(4 * math.pi / 2)
    with pytest.raises(ValueError):
        adams_capacity_bound(1.0, d)
