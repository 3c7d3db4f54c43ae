"""The Riesz form on a ball and the sharp HLS inequality.

We assemble the Galerkin Riesz matrix for n = 2, mu = 1 and compare the
quadratic form against the sharp HLS bound.  Random bumps sit comfortably
below the bound.  The Lieb extremal (1 + r^2)^(-3/2) on a large ball
almost saturates it.
"""

import warnings

import numpy as np

from mtproduct import build_riesz, make_grid
from mtproduct.checks import random_bump
from mtproduct.choquard import hls_check

warnings.simplefilter("ignore", RuntimeWarning)

grid = make_grid(1.0)
op = build_riesz(1.0, 2, grid)
rng = np.random.default_rng(0)
ratios = [hls_check(op, random_bump(rng, grid.nodes), random_bump(rng, grid.nodes))[2] for _ in range(50)]
print(f"random bumps:  max ratio {max(ratios):.4f}, median {np.median(ratios):.4f}")

big = make_grid(50.0)
op_big = build_riesz(1.0, 2, big)
h = (1 + big.nodes**2) ** -1.5
h[-1] = 0.0
print(f"Lieb extremal: ratio {hls_check(op_big, h, h)[2]:.5f}")
