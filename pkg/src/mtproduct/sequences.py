"""Concentrating test functions used to show that the thresholds are sharp."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .radial import ProductPair, RadialProfile
from .special import DimensionParams, sphere_area, split_pair, zeta_nm

__all__ = ["MoserParams", "moser_fn", "product_pair_sequence", "adams_capacity_bound"]


@dataclass(frozen=True)
class MoserParams:
    """Concentration index ``k`` (real values allowed for slope fits), support radius ``rho``."""

    k: float
    rho: float
    n: int = 2
    R: float | None = None

    def __post_init__(self):
        if not self.k >= 2:
            raise ValueError(f"Moser index k must be >= 2, got {self.k}")
        R = self.rho if self.R is None else self.R
        if not 0 < self.rho <= R:
            raise ValueError("need 0 < rho <= R")
        if self.n < 2:
            raise ValueError("n must be >= 2")


def moser_fn(p: MoserParams) -> RadialProfile:
    """Moser function w_k: plateau on [0, rho/k], logarithmic ramp to 0 at rho.

    Its Dirichlet integral is exactly 1 for every k.
    """
    n, k, rho = p.n, float(p.k), float(p.rho)
    logk = math.log(k)
    scale = sphere_area(n) ** (-1.0 / n)
    plateau = scale * logk ** ((n - 1) / n)
    inner = rho / k
    ramp = scale / logk ** (1.0 / n)

    def value(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            mid = ramp * np.log(rho / np.clip(r, inner, rho))
        return np.where(r <= inner, plateau, np.where(r <= rho, mid, 0.0))

    def derivative(r):
        r = np.asarray(r, dtype=float)
        on_ramp = (r > inner) & (r < rho)
        return np.where(on_ramp, -ramp / np.where(on_ramp, r, 1.0), 0.0)

    return RadialProfile(value, derivative, rho, (inner, rho), "analytic")


def product_pair_sequence(p: MoserParams) -> ProductPair:
    """(c1 w_k, c2 w_k) with the symmetric split coefficients; unit product norm."""
    w = moser_fn(p)
    c1, c2 = split_pair(p.n, 1)
    return ProductPair(w.scaled(c1), w.scaled(c2), DimensionParams(p.n, 1))


def adams_capacity_bound(l: float, dims: DimensionParams) -> float:
    """Upper bound (zeta_{n,m} / (n log(1/l)))^{(n-m)/m} on the conductor capacity of B_l in B_1."""
    if not 0 < l < 1:
        raise ValueError("need 0 < l < 1")
    n, m = dims.n, dims.m
    return (zeta_nm(n, m) / (n * math.log(1.0 / l))) ** ((n - m) / m)
