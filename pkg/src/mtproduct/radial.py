"""Radial discretisation of the ball B(0, R).

A :class:`RadialGrid` is a partition of [0, R] graded geometrically toward the
origin.  Integrals of radial functions are computed cell by cell with a
Gauss rule; the cell touching r = 0 uses Gauss-Jacobi so that the weight
r^beta (beta > -1, possibly singular) is integrated exactly against
polynomials.  Profiles may declare breakpoints (kinks, support edges); these
are inserted into the cell partition so that piecewise-smooth closed-form
profiles are integrated without interpolation error.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import logsumexp, roots_jacobi, roots_legendre

from .special import DimensionParams, sphere_area

__all__ = [
    "QuadratureOverflow",
    "UnsupportedOrder",
    "RadialGrid",
    "RadialProfile",
    "ProductPair",
    "make_grid",
    "nodal_profile",
    "constant_profile",
    "dirichlet_seminorm",
    "dirichlet_integral",
    "full_norm",
    "pair_norm",
    "scale_map",
    "weighted_volume_integral",
    "log_weighted_volume_integral",
]

DEFAULT_NODES = 512
DEFAULT_GRADING = 1.05
DEFAULT_ORDER = 6


class QuadratureOverflow(ArithmeticError):
    """An integrand left the floating point range."""


class UnsupportedOrder(NotImplementedError):
    """Numerical norms are only available for first-order spaces (m = 1)."""


@lru_cache(maxsize=None)
def _legendre(order: int):
    x, w = roots_legendre(order)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def _jacobi(order: int, beta: float):
    # weight (1 + x)^beta on [-1, 1]  ->  t^beta on [0, 1]
    x, w = roots_jacobi(order, 0.0, beta)
    return (x + 1.0) / 2.0, w / 2.0 ** (beta + 1.0)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    R: float
    nodes: np.ndarray
    grading: float = 1.0
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("grid needs at least two nodes")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if nodes[0] < 0 or not np.isclose(nodes[-1], self.R, rtol=1e-14, atol=0):
            raise ValueError("grid must cover [r_min >= 0, R]")
        nodes = nodes.copy()
        nodes[-1] = self.R
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    def digest(self) -> str:
        h = hashlib.sha1(self.nodes.tobytes())
        h.update(f"{self.order}".encode())
        return h.hexdigest()[:16]

    def refine(self) -> "RadialGrid":
        """Bisect every cell."""
        mid = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        nodes = np.empty(2 * self.size - 1)
        nodes[0::2] = self.nodes
        nodes[1::2] = mid
        return RadialGrid(self.R, nodes, np.sqrt(self.grading), self.order)

    def cells(self, breaks=()) -> tuple[np.ndarray, np.ndarray]:
        """Cell endpoints after inserting ``breaks`` that fall strictly inside."""
        nodes = self.nodes
        b = np.asarray(breaks, dtype=float).ravel()
        if b.size:
            b = b[(b > nodes[0]) & (b < nodes[-1])]
            if b.size:
                nodes = np.union1d(nodes, b)
                # drop slivers created by breakpoints sitting on a node
                keep = np.concatenate([[True], np.diff(nodes) > 1e-14 * np.maximum(nodes[1:], 1e-300)])
                nodes = nodes[keep]
        return nodes[:-1], nodes[1:]

    def rule(self, beta: float = 0.0, breaks=(), order: int | None = None):
        """Points and weights for the integral of g(r) r^beta dr over [r_min, R].

        Returns arrays (r, w) of shape (cells, order).
        """
        if beta <= -1:
            raise ValueError(f"weight r^{beta} is not integrable at the origin")
        order = order or self.order
        a, b = self.cells(breaks)
        h = b - a
        t, wt = _legendre(order)
        r = a[:, None] + h[:, None] * t[None, :]
        w = h[:, None] * wt[None, :] * r**beta
        if a[0] == 0.0:
            tj, wj = _jacobi(order, float(beta))
            r[0] = h[0] * tj
            w[0] = h[0] ** (beta + 1.0) * wj
        return r, w


def make_grid(R: float = 1.0, node_count: int = DEFAULT_NODES, grading: float = DEFAULT_GRADING,
              order: int = DEFAULT_ORDER) -> RadialGrid:
    """Geometric grid on [0, R]: cell widths h0 * grading**i, smallest cell at 0."""
    if not R > 0:
        raise ValueError("R must be positive")
    if node_count < 16:
        raise ValueError("node_count must be >= 16")
    if grading < 1:
        raise ValueError("grading must be >= 1")
    cells = node_count - 1
    if grading == 1:
        nodes = np.linspace(0.0, R, node_count)
    else:
        lg = np.log(grading)
        h0 = R * np.expm1(lg) / np.expm1(cells * lg)
        widths = h0 * np.exp(lg * np.arange(cells))
        nodes = np.concatenate([[0.0], np.cumsum(widths)])
        nodes *= R / nodes[-1]
    return RadialGrid(float(R), nodes, float(grading), order)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """A radial function r -> value with its a.e. radial derivative.

    ``value`` and ``derivative`` are vectorised callables.  ``breakpoints``
    lists radii where the derivative may jump.
    """

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    support: float
    breakpoints: tuple = ()
    kind: str = "analytic"

    def __call__(self, r):
        return self.value(r)

    def scaled(self, c: float) -> "RadialProfile":
        f, df = self.value, self.derivative
        return RadialProfile(lambda r: c * f(r), lambda r: c * df(r), self.support,
                             self.breakpoints, self.kind)

    def __add__(self, other: "RadialProfile") -> "RadialProfile":
        f, df, g, dg = self.value, self.derivative, other.value, other.derivative
        kind = self.kind if self.kind == other.kind else "analytic"
        return RadialProfile(lambda r: f(r) + g(r), lambda r: df(r) + dg(r),
                             max(self.support, other.support),
                             tuple(sorted(set(self.breakpoints) | set(other.breakpoints))), kind)

    def __mul__(self, c: float) -> "RadialProfile":
        return self.scaled(c)

    __rmul__ = __mul__

    def on(self, grid: RadialGrid) -> np.ndarray:
        """Nodal values on ``grid``."""
        return np.asarray(self.value(grid.nodes), dtype=float)


def nodal_profile(nodes, values) -> RadialProfile:
    """Piecewise linear interpolant of ``values`` at ``nodes`` (zero beyond the last node)."""
    x = np.asarray(nodes, dtype=float).copy()
    y = np.asarray(values, dtype=float).copy()
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("nodes and values must be matching 1-d arrays")
    slope = np.diff(y) / np.diff(x)

    def value(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= x[-1], np.interp(r, x, y), 0.0)

    def derivative(r):
        r = np.asarray(r, dtype=float)
        i = np.clip(np.searchsorted(x, r, side="right") - 1, 0, slope.size - 1)
        return np.where((r >= x[0]) & (r <= x[-1]), slope[i], 0.0)

    return RadialProfile(value, derivative, float(x[-1]), tuple(x[1:-1]), "nodal")


def constant_profile(c: float, support: float) -> RadialProfile:
    """c on [0, support]; has no zero trace, so it only lives in the full space."""
    def value(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= support, c, 0.0)

    return RadialProfile(value, lambda r: np.zeros_like(np.asarray(r, dtype=float)), support, (), "analytic")


@dataclass(frozen=True)
class ProductPair:
    u: RadialProfile
    v: RadialProfile
    dims: DimensionParams = DimensionParams(2, 1)

    @property
    def breakpoints(self) -> tuple:
        return tuple(self.u.breakpoints) + tuple(self.v.breakpoints) + (self.u.support, self.v.support)


def _integrate(integrand, grid: RadialGrid, beta: float, breaks=()) -> float:
    r, w = grid.rule(beta, breaks)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = integrand(r)
        total = float(np.sum(vals * w))
    if not np.isfinite(total):
        raise QuadratureOverflow("integrand exceeded the floating point range")
    return total


def dirichlet_integral(u: RadialProfile, n: int, grid: RadialGrid) -> float:
    """omega_{n-1} * int_0^R |u'(r)|^n r^{n-1} dr."""
    breaks = tuple(u.breakpoints) + (u.support,)
    return sphere_area(n) * _integrate(lambda r: np.abs(u.derivative(r)) ** n, grid, n - 1, breaks)


def dirichlet_seminorm(u: RadialProfile, n: int, grid: RadialGrid) -> float:
    """Gradient L^n norm of a radial profile on B(0, R)."""
    return dirichlet_integral(u, n, grid) ** (1.0 / n)


def full_norm(u: RadialProfile, n: int, grid: RadialGrid) -> float:
    """W^{1,n} norm: (int |u|^n + |grad u|^n dx)^{1/n}."""
    breaks = tuple(u.breakpoints) + (u.support,)
    total = _integrate(lambda r: np.abs(u.value(r)) ** n + np.abs(u.derivative(r)) ** n,
                       grid, n - 1, breaks)
    return (sphere_area(n) * total) ** (1.0 / n)


def pair_norm(p: ProductPair, space: str, grid: RadialGrid) -> float:
    """Product norm on Y = W_0^{1,n} x W_0^{1,n} or Z = W^{1,n} x W^{1,n}."""
    n, m = p.dims.n, p.dims.m
    if m != 1:
        raise UnsupportedOrder("numerical product norms are implemented for m = 1 only")
    if space == "Y":
        nu, nv = dirichlet_seminorm(p.u, n, grid), dirichlet_seminorm(p.v, n, grid)
    elif space == "Z":
        nu, nv = full_norm(p.u, n, grid), full_norm(p.v, n, grid)
    else:
        raise ValueError(f"unknown space {space!r}")
    return (nu**n + nv**n) ** (1.0 / n)


def scale_map(u: RadialProfile, s: float, R: float, n: int) -> RadialProfile:
    """u~(r) = s^{(n-1)/n} u(r^{1/s}) on [0, R^s].

    Preserves the Dirichlet integral and turns the weight r^{sn-1} into
    r^{n-1}.
    """
    if not 0 < s <= 1:
        raise ValueError("scale parameter s must lie in (0, 1]")
    if s == 1:
        return u
    c = s ** ((n - 1) / n)
    f, df = u.value, u.derivative

    def value(r):
        r = np.asarray(r, dtype=float)
        return c * f(r ** (1.0 / s))

    def derivative(r):
        r = np.asarray(r, dtype=float)
        return c * df(r ** (1.0 / s)) * r ** (1.0 / s - 1.0) / s

    breaks = tuple(b**s for b in u.breakpoints)
    return RadialProfile(value, derivative, min(u.support, R) ** s, breaks, "analytic")


def weighted_volume_integral(g: Callable, lam: float, grid: RadialGrid, n: int, breaks=()) -> float:
    """omega_{n-1} * int_0^R g(r) r^{n-1-lam} dr, i.e. int_B g(|x|) |x|^{-lam} dx."""
    if lam >= n:
        raise ValueError(f"singular weight |x|^-{lam} is not integrable for lam >= n = {n}")
    return sphere_area(n) * _integrate(g, grid, n - 1 - lam, breaks)


def log_weighted_volume_integral(log_g: Callable, lam: float, grid: RadialGrid, n: int, breaks=()):
    """Logarithm of :func:`weighted_volume_integral` for g = exp(log_g).

    Returns ``(log_value, max_log_integrand, radius_of_max)``; never overflows.
    """
    if lam >= n:
        raise ValueError(f"singular weight |x|^-{lam} is not integrable for lam >= n = {n}")
    r, w = grid.rule(n - 1 - lam, breaks)
    lg = np.asarray(log_g(r), dtype=float)
    lg = np.broadcast_to(lg, r.shape)
    i = int(np.argmax(lg))
    pos = w > 0
    val = logsumexp(lg[pos], b=w[pos]) + np.log(sphere_area(n))
    return float(val), float(lg.flat[i]), float(r.flat[i])
