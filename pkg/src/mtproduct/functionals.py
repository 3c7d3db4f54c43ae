"""Exponential functionals on product spaces, proof-step checks and blow-up sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .radial import (
    ProductPair,
    RadialGrid,
    RadialProfile,
    dirichlet_seminorm,
    full_norm,
    log_weighted_volume_integral,
    pair_norm,
)
from .sequences import MoserParams, product_pair_sequence
from .special import DimensionParams, alpha_n, sphere_area, two_nm, zeta_nm

__all__ = [
    "MTQuery",
    "IntegrandOverflow",
    "exp_functional",
    "log_exp_functional",
    "moser_trudinger_functional",
    "threshold",
    "SweepRow",
    "SweepResult",
    "blowup_sweep",
    "fit_slope",
    "HolderSplit",
    "holder_split_check",
    "young_constant",
    "young_split_check",
    "lions_bound",
    "lions_bound_check",
]

LOG_OVERFLOW = 700.0
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


class IntegrandOverflow(ArithmeticError):
    """The exponential integrand left double range at ``radius``."""

    def __init__(self, radius: float, log_value: float):
        super().__init__(f"exponential integrand overflows near r = {radius:.6g} (log = {log_value:.6g})")
        self.radius = radius
        self.log_value = log_value


@dataclass(frozen=True)
class MTQuery:
    """Coefficient ``theta`` in front of |u|^{n/(n-1)} + |v|^{n/(n-1)} and weight exponent ``lam``."""

    theta: float
    lam: float = 0.0
    space: str = "Y"
    dims: DimensionParams = DimensionParams(2, 1)

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        if not 0 <= self.lam < self.dims.n:
            raise ValueError("need 0 <= lam < n")
        if self.space not in ("Y", "Z"):
            raise ValueError("space must be 'Y' or 'Z'")


def _log_integrand(pair: ProductPair, theta: float, q: float):
    u, v = pair.u.value, pair.v.value

    def log_g(r):
        return theta * (np.abs(u(r)) ** q + np.abs(v(r)) ** q)

    return log_g


def log_exp_functional(pair: ProductPair, q: MTQuery, grid: RadialGrid):
    """Log of the singular exponential functional.

    Returns ``(log_value, max_log_integrand, radius_of_max)``.
    """
    n = q.dims.n
    log_g = _log_integrand(pair, q.theta, n / (n - 1))
    return log_weighted_volume_integral(log_g, q.lam, grid, n, pair.breakpoints)


def exp_functional(pair: ProductPair, q: MTQuery, grid: RadialGrid, on_overflow: str = "inf") -> float:
    """int_B exp(theta (|u|^{n/(n-1)} + |v|^{n/(n-1)})) |x|^{-lam} dx.

    The integrand is handled in log space.  When it exceeds e^700 somewhere
    the result is ``inf`` (``on_overflow="inf"``) or :class:`IntegrandOverflow`
    is raised (``on_overflow="raise"``).
    """
    logv, peak, radius = log_exp_functional(pair, q, grid)
    if peak > LOG_OVERFLOW or logv > _LOG_FLOAT_MAX:
        if on_overflow == "raise":
            raise IntegrandOverflow(radius, peak)
        return math.inf
    return math.exp(logv)


def moser_trudinger_functional(u: RadialProfile, alpha: float, grid: RadialGrid, n: int) -> float:
    """Scalar int_B exp(alpha |u|^{n/(n-1)}) dx, by plain Gauss quadrature."""
    r, w = grid.rule(n - 1, tuple(u.breakpoints) + (u.support,))
    return float(sphere_area(n) * np.sum(np.exp(alpha * np.abs(u.value(r)) ** (n / (n - 1))) * w))


def threshold(n: int, m: int = 1, lam: float = 0.0, space: str = "Y") -> float:
    """Critical coefficient of the product inequality.

    Y, m = 1: (1 - lam/n) alpha_n / 2_n.  Z: (1 - lam/n) alpha_n / 2.
    Y, lam = 0, any m: zeta_{n,m} / 2_{n,m}.
    """
    dims = DimensionParams(n, m)
    if not 0 <= lam < n:
        raise ValueError("need 0 <= lam < n")
    if space == "Y":
        if m == 1:
            return (1.0 - lam / n) * alpha_n(n) / two_nm(n, 1)
        if lam == 0:
            return zeta_nm(n, m) / two_nm(n, m)
        raise ValueError("singular thresholds are only available for m = 1")
    if space == "Z":
        if dims.m != 1:
            raise ValueError("the full-norm space is first order")
        return (1.0 - lam / n) * alpha_n(n) / 2.0
    raise ValueError(f"unknown space {space!r}")


@dataclass(frozen=True)
class SweepRow:
    k: float
    value: float
    log_value: float
    overflow: bool
    overflow_radius: float | None


@dataclass
class SweepResult:
    epsilon: float
    lam: float
    n: int
    theta: float
    rows: list[SweepRow]
    slope: float
    expected_lower_bound: float
    ratio: float = field(default=math.nan)

    @property
    def passed(self) -> bool:
        if self.epsilon > 0:
            return self.slope >= self.expected_lower_bound
        return self.bounded

    @property
    def bounded(self) -> bool:
        return self.slope < 0.05


def fit_slope(ks, log_values) -> float:
    """Least-squares slope of log(value) against log(k) over the last ceil(N/2) points."""
    ks = np.asarray(ks, dtype=float)
    lv = np.asarray(log_values, dtype=float)
    tail = math.ceil(ks.size / 2)
    x, y = np.log(ks[-tail:]), lv[-tail:]
    if tail < 2:
        return math.nan
    return float(np.polyfit(x, y, 1)[0])


def blowup_sweep(epsilon: float, lam: float, n: int, k_list, grid: RadialGrid,
                 rho: float | None = None) -> SweepResult:
    """Evaluate the functional on the Moser pair sequence at (1 + epsilon) * threshold.

    The support radius defaults to R.  Expected growth is k^{epsilon (n - lam)}.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    ks = [float(k) for k in k_list]
    if len(ks) < 4 or np.any(np.diff(ks) <= 0):
        raise ValueError("k_list must be increasing with at least 4 entries")
    rho = grid.R if rho is None else rho
    theta = (1.0 + epsilon) * threshold(n, 1, lam, "Y")
    q = MTQuery(theta, lam, "Y", DimensionParams(n, 1))
    rows = []
    for k in ks:
        pair = product_pair_sequence(MoserParams(k, rho, n, grid.R))
        logv, peak, radius = log_exp_functional(pair, q, grid)
        over = peak > LOG_OVERFLOW or logv > _LOG_FLOAT_MAX
        rows.append(SweepRow(k, math.inf if over else math.exp(logv), logv, over,
                             radius if over else None))
    slope = fit_slope(ks, [r.log_value for r in rows])
    tail = rows[-math.ceil(len(rows) / 2):]
    ratio = math.exp(max(r.log_value for r in tail) - min(r.log_value for r in tail))
    return SweepResult(epsilon, lam, n, theta, rows, slope, 0.8 * epsilon * (n - lam), ratio)


@dataclass(frozen=True)
class HolderSplit:
    lhs: float
    rhs: float
    inv_c: float

    def __iter__(self):
        return iter((self.lhs, self.rhs))

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-6)


def holder_split_check(p: ProductPair, theta: float, grid: RadialGrid, space: str = "Y",
                       norm_tol: float = 1e-6) -> HolderSplit:
    """Both sides of the generalised Hoelder bound of a unit-norm pair.

    rhs = |B|^{1/c} (int exp(theta 2_n (|u|/|u|)^q))^{a_u} (same for v)^{a_v}
    with a_u = ||u||^q / 2_n and 1/c = 1 - a_u - a_v.
    """
    n, m = p.dims.n, p.dims.m
    if m != 1:
        raise ValueError("numerical split check is implemented for m = 1")
    nrm = pair_norm(p, space, grid)
    if abs(nrm - 1.0) > norm_tol:
        raise ValueError(f"pair must have unit norm, got {nrm!r}")
    norm_of = dirichlet_seminorm if space == "Y" else full_norm
    nu, nv = norm_of(p.u, n, grid), norm_of(p.v, n, grid)
    if nu == 0 or nv == 0:
        raise ValueError("degenerate pair: one component vanishes (single-function case)")
    q = n / (n - 1)
    split = two_nm(n, 1)
    a_u, a_v = nu**q / split, nv**q / split
    inv_c = 1.0 - a_u - a_v
    if abs(inv_c) < 1e-9:
        inv_c = 0.0
    if inv_c < 0:
        raise ValueError(f"split exponents exceed one (1/c = {inv_c})")
    br = p.breakpoints
    zero = lambda r: np.zeros_like(r)
    log_vol, _, _ = log_weighted_volume_integral(zero, 0.0, grid, n, br)
    lhs, _, _ = log_weighted_volume_integral(_log_integrand(p, theta, q), 0.0, grid, n, br)
    u, v = p.u.value, p.v.value
    log_iu, _, _ = log_weighted_volume_integral(
        lambda r: theta * split * (np.abs(u(r)) / nu) ** q, 0.0, grid, n, br)
    log_iv, _, _ = log_weighted_volume_integral(
        lambda r: theta * split * (np.abs(v(r)) / nv) ** q, 0.0, grid, n, br)
    rhs = inv_c * log_vol + a_u * log_iu + a_v * log_iv
    return HolderSplit(math.exp(lhs), math.exp(rhs), inv_c)


@lru_cache(maxsize=None)
def young_constant(n: int, m: int = 1) -> float:
    """C_1(n, m) = C(n, m) (n - m)/n.

    C(n, m) is the largest ratio of the binomial remainder (a+b)^q - a^q - b^q
    to a^{q-1} b + b^{q-1} a on the simplex a + b = 1, q = n/(n-m).  Found by a
    1e-5 grid search refined with a bounded scalar minimiser.
    """
    DimensionParams(n, m)
    q = n / (n - m)

    def ratio(x):
        y = 1.0 - x
        return (1.0 - x**q - y**q) / (x ** (q - 1) * y + y ** (q - 1) * x)

    xs = np.linspace(1e-5, 0.5, 50000)
    vals = ratio(xs)
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    best = vals[i]
    if hi > lo:
        res = minimize_scalar(lambda x: -ratio(x), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        best = max(best, -res.fun)
    return float(best) * (n - m) / n


def young_split_check(a: float, b: float, eps: float, dims: DimensionParams) -> tuple[float, float]:
    """(a + b)^q against C_{1,eps} a^q + C'_{1,eps} b^q, q = n/(n-m)."""
    if a < 0 or b < 0 or not eps > 0:
        raise ValueError("need a, b >= 0 and eps > 0")
    n, m = dims.n, dims.m
    q = n / (n - m)
    c1 = young_constant(n, m)
    c_eps = 1.0 + c1 * eps ** (n / m) + c1 * eps**q
    c_eps_dual = 1.0 + c1 * eps ** (-n / m) + c1 * eps ** (-q)
    return (a + b) ** q, c_eps * a**q + c_eps_dual * b**q


def lions_bound(limit_norm: float, dims: DimensionParams) -> float:
    """zeta_{n,m} / (2_{n,m} (1 - ||(u,v)||^{n/m})^{m/(n-m)})."""
    if not 0 < limit_norm < 1:
        raise ValueError("the weak limit must have norm in (0, 1)")
    n, m = dims.n, dims.m
    return zeta_nm(n, m) / (two_nm(n, m) * (1.0 - limit_norm ** (n / m)) ** (m / (n - m)))


@dataclass
class LionsResult:
    limit_norm: float
    p_factor: float
    p: float
    rows: list[tuple[float, float]]

    @property
    def ratio(self) -> float:
        lv = [v for _, v in self.rows]
        return max(lv) / min(lv)

    @property
    def growing(self) -> bool:
        lv = [v for _, v in self.rows[-3:]]
        return all(b > a for a, b in zip(lv, lv[1:]))


def lions_bound_check(limit_pair: ProductPair, concentration_k_list, p_factor: float,
                      grid: RadialGrid, rho: float | None = None) -> LionsResult:
    """Functional along (limit + concentrating Moser pair), renormalised to unit norm.

    The concentrating part carries the missing norm (1 - ||limit||^n)^{1/n}.
    The coefficient is p = p_factor * lions_bound(||limit||).
    """
    n, m = limit_pair.dims.n, limit_pair.dims.m
    if m != 1:
        raise ValueError("numerical Lions check is implemented for m = 1")
    L = pair_norm(limit_pair, "Y", grid)
    if not 0 < L < 1:
        raise ValueError(f"limit pair norm must lie in (0, 1), got {L}")
    p = p_factor * lions_bound(L, limit_pair.dims)
    mass = (1.0 - L**n) ** (1.0 / n)
    rho = grid.R if rho is None else rho
    rows = []
    for k in concentration_k_list:
        conc = product_pair_sequence(MoserParams(float(k), rho, n, grid.R))
        u = limit_pair.u + conc.u.scaled(mass)
        v = limit_pair.v + conc.v.scaled(mass)
        pair = ProductPair(u, v, limit_pair.dims)
        s = pair_norm(pair, "Y", grid)
        pair = ProductPair(u.scaled(1 / s), v.scaled(1 / s), limit_pair.dims)
        rows.append((float(k), exp_functional(pair, MTQuery(p, 0.0, "Y", limit_pair.dims), grid)))
    return LionsResult(L, p_factor, p, rows)
