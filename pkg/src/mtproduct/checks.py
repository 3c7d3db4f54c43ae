"""Seeded randomized suites for the proof-level identities and inequalities.

Each suite returns a :class:`SuiteReport`; failing cases are kept as plain
dicts so they can be serialised as they are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .choquard import build_riesz, hls_check
from .functionals import (
    MTQuery,
    exp_functional,
    holder_split_check,
    lions_bound_check,
    threshold,
    young_split_check,
)
from .radial import (
    ProductPair,
    dirichlet_integral,
    make_grid,
    nodal_profile,
    pair_norm,
    scale_map,
)
from .special import DimensionParams

__all__ = ["SuiteReport", "SUITES", "run_suite", "random_profile", "random_bump",
           "LIONS_RATIO_BOUND", "DEFAULT_SEED"]

DEFAULT_SEED = 0
# max/min of the Lions functional over k = 16..1024 at 0.9 x bound, limit norms in [0.3, 0.6]
LIONS_RATIO_BOUND = 3.0
_LIONS_K = (16, 32, 64, 128, 256, 512, 1024)


@dataclass
class SuiteReport:
    suite: str
    seed: int
    trials: int
    passed: bool
    summary: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "trials": self.trials, "passed": self.passed,
                "summary": self.summary, "failures": self.failures}


def random_profile(rng: np.random.Generator, R: float = 1.0, knots: int = 9):
    """Nonnegative piecewise linear profile vanishing at R, random knots and values."""
    inner = np.sort(rng.uniform(0.0, R, knots - 2))
    nodes = np.concatenate([[0.0], inner, [R]])
    nodes = np.unique(nodes)
    vals = rng.uniform(0.0, 1.0, nodes.size)
    vals[-1] = 0.0
    return nodal_profile(nodes, vals)


def random_bump(rng: np.random.Generator, nodes: np.ndarray) -> np.ndarray:
    """Nodal values of a random nonnegative quadratic bump."""
    c = rng.uniform(0.0, 1.0) * nodes[-1]
    w = (0.02 + 0.5 * rng.uniform()) * nodes[-1]
    return np.maximum(0.0, 1.0 - ((nodes - c) / w) ** 2) * rng.uniform(0.1, 10.0)


def _unit_pair(rng, grid, n=2):
    u, v = random_profile(rng, grid.R), random_profile(rng, grid.R)
    p = ProductPair(u, v, DimensionParams(n, 1))
    s = pair_norm(p, "Y", grid)
    return ProductPair(u.scaled(1 / s), v.scaled(1 / s), p.dims)


def _holder(seed, trials):
    rng = np.random.default_rng(seed)
    grid = make_grid()
    fails, worst = [], 0.0
    for i in range(trials):
        p = _unit_pair(rng, grid)
        theta = rng.uniform(0.1, 1.0) * threshold(2, 1, 0.0, "Y")
        res = holder_split_check(p, theta, grid)
        worst = max(worst, res.lhs / res.rhs)
        if not res.holds:
            fails.append({"trial": i, "theta": theta, "lhs": res.lhs, "rhs": res.rhs})
    return fails, {"max_lhs_over_rhs": worst}


def _young(seed, trials):
    rng = np.random.default_rng(seed)
    dims_pool = [DimensionParams(2, 1), DimensionParams(3, 1), DimensionParams(4, 1),
                 DimensionParams(4, 2), DimensionParams(6, 2), DimensionParams(9, 3)]
    fails, worst = [], 0.0
    for i in range(trials):
        dims = dims_pool[rng.integers(len(dims_pool))]
        a, b = np.exp(rng.normal(0, 2, 2))
        eps = math.exp(rng.uniform(math.log(0.05), math.log(20.0)))
        lhs, rhs = young_split_check(a, b, eps, dims)
        worst = max(worst, lhs / rhs)
        if lhs > rhs * (1 + 1e-12):
            fails.append({"trial": i, "n": dims.n, "m": dims.m, "a": a, "b": b, "eps": eps,
                          "lhs": lhs, "rhs": rhs})
    return fails, {"max_lhs_over_rhs": worst}


def _scaling(seed, trials):
    rng = np.random.default_rng(seed)
    n, R = 2, 1.0
    grid = make_grid(R)
    fails, worst_d, worst_f = [], 0.0, 0.0
    for i in range(trials):
        u, v = random_profile(rng, R), random_profile(rng, R)
        theta = rng.uniform(0.2, 2.0)
        for s in (0.25, 0.5, 0.75):
            su, sv = scale_map(u, s, R, n), scale_map(v, s, R, n)
            sgrid = make_grid(R**s)
            d0 = dirichlet_integral(u, n, grid)
            d1 = dirichlet_integral(su, n, sgrid)
            err_d = abs(d1 - d0) / d0
            lam = (1.0 - s) * n
            lhs = exp_functional(ProductPair(u, v), MTQuery(theta, lam), grid)
            rhs = exp_functional(ProductPair(su, sv), MTQuery(theta / s, 0.0), sgrid) / s
            err_f = abs(lhs - rhs) / abs(rhs)
            worst_d, worst_f = max(worst_d, err_d), max(worst_f, err_f)
            if err_d > 1e-4 or err_f > 1e-4:
                fails.append({"trial": i, "s": s, "theta": theta, "dirichlet_rel_err": err_d,
                              "functional_rel_err": err_f})
    return fails, {"max_dirichlet_rel_err": worst_d, "max_functional_rel_err": worst_f}


def _hls(seed, trials):
    rng = np.random.default_rng(seed)
    grid = make_grid()
    fails, summary = [], {}
    for n, mu in ((2, 1.0), (3, 1.5)):
        op = build_riesz(mu, n, grid)
        worst = 0.0
        for i in range(trials):
            f, g = random_bump(rng, grid.nodes), random_bump(rng, grid.nodes)
            lhs, rhs, ratio = hls_check(op, f, g)
            worst = max(worst, ratio)
            if ratio > 1.0 + 1e-9:
                fails.append({"trial": i, "n": n, "mu": mu, "lhs": lhs, "rhs": rhs, "ratio": ratio})
        summary[f"max_ratio_n{n}_mu{mu:g}"] = worst
    return fails, summary


def _lions(seed, trials):
    rng = np.random.default_rng(seed)
    grid = make_grid()
    r = np.linspace(0.0, 1.0, 65)
    base = nodal_profile(r, 1.0 - r**2)
    nb = pair_norm(ProductPair(base, base), "Y", grid)
    fails, worst_sub, least_super = [], 0.0, math.inf
    for i in range(trials):
        L = rng.uniform(0.3, 0.6)
        limit = ProductPair(base.scaled(L / nb), base.scaled(L / nb))
        sub = lions_bound_check(limit, _LIONS_K, 0.9, grid)
        sup = lions_bound_check(limit, _LIONS_K, 1.5, grid)
        worst_sub = max(worst_sub, sub.ratio)
        least_super = min(least_super, sup.ratio)
        if sub.ratio > LIONS_RATIO_BOUND or not sup.growing:
            fails.append({"trial": i, "limit_norm": L, "ratio_below": sub.ratio,
                          "ratio_above": sup.ratio, "growing_above": sup.growing})
    return fails, {"max_ratio_below": worst_sub, "min_ratio_above": least_super,
                   "ratio_bound": LIONS_RATIO_BOUND}


SUITES = {
    "holder": (_holder, 100),
    "young": (_young, 1000),
    "scaling": (_scaling, 20),
    "hls": (_hls, 200),
    "lions": (_lions, 5),
}


def run_suite(name: str, seed: int = DEFAULT_SEED, trials: int | None = None) -> SuiteReport:
    """Run a named suite; deterministic for a given seed."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    fn, default_trials = SUITES[name]
    trials = default_trials if trials is None else int(trials)
    if trials < 1:
        raise ValueError("trials must be positive")
    fails, summary = fn(seed, trials)
    return SuiteReport(name, seed, trials, not fails, summary, fails)
