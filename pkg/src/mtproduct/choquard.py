"""Riesz potential for radial functions, HLS checks and the (KCS) model data.

The radial bilinear form

    D(f, g) = int int f(|x|) g(|y|) |x - y|^{-mu} dx dy

is reduced to a double integral in (r, rho) against the sphere kernel
K(r, rho) = int_{S^{n-1}} |r e_1 - rho w|^{-mu} dsigma(w).  Nodal values are
interpolated piecewise linearly and D is assembled as a Galerkin matrix.
K has an integrable singularity on the diagonal r = rho (logarithmic for
mu = n - 1, a power |r - rho|^{n-1-mu} above that); cell pairs touching the
diagonal are integrated with Duffy-type transforms graded toward it.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .radial import RadialGrid, _legendre
from .special import hls_constant, sphere_area

__all__ = [
    "RieszOperator",
    "KirchhoffModel",
    "NonlinearityModel",
    "GrowthFitFailure",
    "sphere_kernel",
    "build_riesz",
    "load_riesz",
    "riesz_form",
    "hls_check",
    "F_eval",
    "f1_eval",
    "f2_eval",
    "log_F",
    "growth_bound_check",
    "check_f3",
    "check_f5",
    "check_m3",
    "f_hessian",
]

_MAX_DEPTH = 64
_DUFFY_PANELS = 18


class GrowthFitFailure(RuntimeError):
    """No finite constants bound the sampled nonlinearity."""


@lru_cache(maxsize=None)
def _gauss(order: int):
    return roots_legendre(order)


def _inv_power(d2, mu):
    # d2^{-mu/2} with cheap paths for the common exponents
    if mu == 1.0:
        return 1.0 / np.sqrt(d2)
    if mu == 2.0:
        return 1.0 / d2
    return np.exp(-0.5 * mu * np.log(d2))


def _angular_integrand(theta, r, rho, mu, n):
    d2 = (r - rho) ** 2 + 4.0 * r * rho * np.sin(0.5 * theta) ** 2
    out = _inv_power(d2, mu)
    if n > 2:
        out = out * np.sin(theta) ** (n - 2)
    return out


def _panel_sum(th, w, delta2, four_rr, mu, n):
    """sum_k w_k (delta^2 + 4 r rho sin^2(th_k/2))^{-mu/2} sin^{n-2} th_k for a shared panel."""
    s2 = np.sin(0.5 * th) ** 2
    vals = _inv_power(delta2[:, None] + four_rr[:, None] * s2[None, :], mu)
    ww = w * np.sin(th) ** (n - 2) if n > 2 else w
    return vals @ ww


def sphere_kernel(r, rho, mu: float, n: int, angular_order: int = 8) -> np.ndarray:
    """K(r, rho) = int_{S^{n-1}} |r e_1 - rho w|^{-mu} dsigma(w).

    Gauss-Legendre in the polar angle on panels [pi 2^{-j-1}, pi 2^{-j}]
    graded toward theta = 0; the depth adapts to |r - rho| / sqrt(r rho) so
    the peak of the integrand is always resolved.  On the diagonal the last
    panel uses Gauss-Jacobi for the theta^{n-2-mu} endpoint behaviour; the
    result is ``inf`` when that is not integrable (mu >= n - 1).
    """
    if not 0 < mu < n:
        raise ValueError(f"need 0 < mu < n, got mu={mu}")
    r, rho = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(rho, dtype=float))
    shape = r.shape
    r, rho = r.ravel(), rho.ravel()
    out = np.empty(r.size)
    omega_sub = 2.0 if n == 2 else sphere_area(n - 1)
    omega = sphere_area(n)

    at_origin = (r == 0) | (rho == 0)
    out[at_origin] = omega * (r[at_origin] + rho[at_origin]) ** (-mu)

    delta = np.abs(r - rho)
    c = np.sqrt(r * rho)
    delta2, four_rr = delta**2, 4.0 * r * rho
    diag = (~at_origin) & (delta == 0)
    gen = ~(at_origin | diag)

    with np.errstate(divide="ignore"):
        depth = np.where(gen, np.ceil(np.log2(np.pi * c / np.where(gen, delta, 1.0))) + 2, _MAX_DEPTH)
    depth = np.clip(depth, 1, _MAX_DEPTH).astype(int)
    depth[at_origin] = 0

    x, w = _gauss(angular_order)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    acc = np.zeros(r.size)
    idx_all = np.nonzero(~at_origin)[0]
    for j in range(int(depth[idx_all].max()) if idx_all.size else 0):
        idx = idx_all[depth[idx_all] > j]
        if idx.size == 0:
            break
        lo, hi = np.pi * 2.0 ** (-j - 1), np.pi * 2.0 ** (-j)
        acc[idx] += (hi - lo) * _panel_sum(lo + (hi - lo) * x, w, delta2[idx], four_rr[idx], mu, n)
    # final panel [0, pi 2^{-depth}]
    idx = np.nonzero(gen)[0]
    if idx.size:
        top = np.pi * 2.0 ** (-depth[idx].astype(float))
        th = top[:, None] * x[None, :]
        vals = _angular_integrand(th, r[idx, None], rho[idx, None], mu, n)
        acc[idx] += top * (vals @ w)
    idx = np.nonzero(diag)[0]
    if idx.size:
        e = n - 2 - mu
        if e <= -1:
            acc[idx] = np.inf
        else:
            xj, wj = roots_jacobi(angular_order, 0.0, e)
            xj, wj = 0.5 * (xj + 1.0), wj / 2.0 ** (e + 1.0)
            top = np.pi * 2.0 ** (-_MAX_DEPTH)
            th = top * xj
            vals = _angular_integrand(th[None, :], r[idx, None], rho[idx, None], mu, n) * th ** (-e)
            acc[idx] += top ** (e + 1.0) * (vals @ wj)
    out[~at_origin] = omega_sub * acc[~at_origin]
    return out.reshape(shape)


@dataclass(frozen=True, eq=False)
class RieszOperator:
    """Galerkin matrix of the Riesz bilinear form on a fixed radial grid.

    ``matrix[i, j]`` is D(phi_i, phi_j) for the hat functions phi_i.
    ``mass[i]`` is the volume weight int phi_i dx.  ``kernel`` rescales the
    matrix to approximate the sphere kernel K(r_i, r_j), so that
    D(f, g) = sum_ij q_i q_j f_i g_j kernel_ij with q = mass / sqrt(omega).
    """

    mu: float
    n: int
    grid: RadialGrid
    angular_order: int
    matrix: np.ndarray
    mass: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return self.mass / math.sqrt(sphere_area(self.n))

    @property
    def kernel(self) -> np.ndarray:
        q = self.weights
        return self.matrix / np.outer(q, q)

    def key(self) -> str:
        return f"n{self.n}_mu{self.mu!r}_g{self.grid.digest()}_a{self.angular_order}"

    def save(self, path) -> None:
        """Binary cache (npz) keyed by (n, mu, grid hash, angular order)."""
        np.savez(path, key=self.key(), mu=self.mu, n=self.n, angular_order=self.angular_order,
                 R=self.grid.R, nodes=self.grid.nodes, grading=self.grid.grading,
                 order=self.grid.order, matrix=self.matrix, mass=self.mass)


def load_riesz(path) -> RieszOperator:
    with np.load(path) as z:
        grid = RadialGrid(float(z["R"]), z["nodes"], float(z["grading"]), int(z["order"]))
        return RieszOperator(float(z["mu"]), int(z["n"]), grid, int(z["angular_order"]),
                             z["matrix"], z["mass"])


def _hat_mass(grid: RadialGrid, n: int) -> np.ndarray:
    a, b = grid.nodes[:-1], grid.nodes[1:]
    t, w = _legendre(max(grid.order, n))
    h = b - a
    r = a[:, None] + h[:, None] * t
    wr = h[:, None] * w * r ** (n - 1)
    mass = np.zeros(grid.size)
    mass[:-1] += np.sum(wr * (1 - t), axis=1)
    mass[1:] += np.sum(wr * t, axis=1)
    return sphere_area(n) * mass


def _graded_rule(order: int, panels: int, sing: float):
    """Rule on [0, 1] graded toward 0 for integrands ~ x^sing times smooth."""
    t, w = _legendre(order)
    xs, ws = [], []
    for j in range(panels):
        lo, hi = 2.0 ** (-j - 1), 2.0 ** (-j)
        xs.append(lo + (hi - lo) * t)
        ws.append((hi - lo) * w)
    top = 2.0 ** (-panels)
    if -1 < sing < 0:
        xj, wj = roots_jacobi(order, 0.0, sing)
        xj = 0.5 * (xj + 1.0)
        wj = wj / 2.0 ** (sing + 1.0)
        x_last = top * xj
        xs.append(x_last)
        ws.append(top ** (sing + 1.0) * wj * x_last ** (-sing))
    else:
        xs.append(top * t)
        ws.append(top * w)
    return np.concatenate(xs), np.concatenate(ws)


class _Accumulator:
    def __init__(self, size: int):
        self.size = size
        self.flat = np.zeros(size * size)

    def add(self, cell_r, cell_rho, tr, trho, wt):
        """Add int phi_k(r) phi_l(rho) wt for local hat pairs; t = local coordinates."""
        N = self.size
        phis_r = ((1 - tr), tr)
        phis_p = ((1 - trho), trho)
        for k in (0, 1):
            for l in (0, 1):
                contrib = (wt * phis_r[k] * phis_p[l]).sum(axis=-1)
                np.add.at(self.flat, (cell_r + k) * N + (cell_rho + l), contrib)


def _kernel_chunked(r, rho, mu, n, angular_order, chunk=400_000):
    out = np.empty(r.shape)
    rf, pf, of = r.ravel(), rho.ravel(), out.reshape(-1)
    for s in range(0, rf.size, chunk):
        of[s:s + chunk] = sphere_kernel(rf[s:s + chunk], pf[s:s + chunk], mu, n, angular_order)
    return out


def build_riesz(mu: float, n: int, grid: RadialGrid, angular_order: int = 8,
                cache_dir: str | os.PathLike | None = None) -> RieszOperator:
    """Assemble the Riesz Galerkin matrix on ``grid``.

    Well separated cell pairs use tensor Gauss rules; equal and adjacent
    cells use Duffy transforms graded toward the singular diagonal / corner.
    With ``cache_dir`` the result is stored as ``<key>.npz`` and reused.
    """
    if not 0 < mu < n:
        raise ValueError(f"need 0 < mu < n, got mu={mu}")
    if cache_dir is not None:
        probe = RieszOperator(mu, n, grid, angular_order, np.empty(0), np.empty(0))
        path = os.path.join(os.fspath(cache_dir), probe.key() + ".npz")
        if os.path.exists(path):
            return load_riesz(path)
    op = _build_cached(float(mu), int(n), grid.digest(), grid, angular_order)
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        op.save(path)
    return op


_BUILD_CACHE: dict = {}


def _build_cached(mu, n, digest, grid, angular_order):
    key = (mu, n, digest, grid.R, angular_order)
    if key not in _BUILD_CACHE:
        if len(_BUILD_CACHE) > 16:
            _BUILD_CACHE.clear()
        _BUILD_CACHE[key] = _assemble(mu, n, grid, angular_order)
    return _BUILD_CACHE[key]


def _assemble(mu, n, grid, angular_order):
    if mu >= n - 1:
        warnings.warn(f"mu={mu} >= n-1: sphere kernel is singular on the diagonal; "
                      "using graded Duffy integration for diagonal cells", RuntimeWarning, stacklevel=3)
    a, b = grid.nodes[:-1], grid.nodes[1:]
    h = b - a
    N = grid.size
    cells = a.size
    p = grid.order
    t, w = _legendre(p)
    acc = _Accumulator(N)
    omega = sphere_area(n)
    sing = n - 1 - mu  # K ~ |r - rho|^sing near the diagonal (log when 0)

    # well separated pairs I + 2 <= J, tensor Gauss
    I, J = np.triu_indices(cells, k=2)
    if I.size:
        tr, tp = np.meshgrid(t, t, indexing="ij")
        tr, tp = tr.ravel(), tp.ravel()
        ww = np.outer(w, w).ravel()
        step = max(1, 300_000 // (p * p))
        for s in range(0, I.size, step):
            Ii, Jj = I[s:s + step], J[s:s + step]
            r = a[Ii, None] + h[Ii, None] * tr
            rho = a[Jj, None] + h[Jj, None] * tp
            K = _kernel_chunked(r, rho, mu, n, angular_order)
            wt = omega * ww * (h[Ii] * h[Jj])[:, None] * r ** (n - 1) * rho ** (n - 1) * K
            acc.add(Ii, Jj, np.broadcast_to(tr, r.shape), np.broadcast_to(tp, r.shape), wt)

    xg, wxg = _graded_rule(p, _DUFFY_PANELS, sing)
    X, Y = np.meshgrid(xg, t, indexing="ij")
    WX = np.outer(wxg, w)
    X, Y, WX = X.ravel(), Y.ravel(), WX.ravel()

    # equal cells: triangle rho < r with r - rho = h x, rho = a + h (1 - x) y
    Ic = np.arange(cells)
    rho_t = (1 - X) * Y
    r_t = rho_t + X
    r = a[:, None] + h[:, None] * r_t
    rho = a[:, None] + h[:, None] * rho_t
    K = _kernel_chunked(r, rho, mu, n, angular_order)
    wt = omega * WX * (1 - X) * (h**2)[:, None] * r ** (n - 1) * rho ** (n - 1) * K
    tri = _Accumulator(N)
    tri.add(Ic, Ic, np.broadcast_to(r_t, r.shape), np.broadcast_to(rho_t, r.shape), wt)
    T = tri.flat.reshape(N, N)

    # adjacent cells J = I + 1: corner at the shared node, two Duffy triangles
    if cells > 1:
        I1 = np.arange(cells - 1)
        for alpha, beta in ((X, X * Y), (X * Y, X)):
            tr_loc = 1.0 - alpha          # r = b_I - h_I alpha
            tp_loc = beta                 # rho = a_J + h_J beta
            r = b[I1, None] - h[I1, None] * alpha
            rho = a[I1 + 1, None] + h[I1 + 1, None] * beta
            K = _kernel_chunked(r, rho, mu, n, angular_order)
            wt = omega * WX * X * (h[I1] * h[I1 + 1])[:, None] * r ** (n - 1) * rho ** (n - 1) * K
            acc.add(I1, I1 + 1, np.broadcast_to(tr_loc, r.shape), np.broadcast_to(tp_loc, r.shape), wt)

    # acc holds the region cell(rho) > cell(r); mirror it and add the diagonal cells
    P = acc.flat.reshape(N, N)
    A = P + P.T + T + T.T
    return RieszOperator(mu, n, grid, angular_order, A, _hat_mass(grid, n))


def riesz_form(op: RieszOperator, f, g) -> float:
    """D(f, g) for nodal values on ``op.grid``."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (op.grid.size,) or g.shape != (op.grid.size,):
        raise ValueError(f"nodal arrays must have shape ({op.grid.size},)")
    return float(f @ op.matrix @ g)


def lebesgue_norm(op: RieszOperator, f, t: float) -> float:
    """L^t norm of the piecewise linear interpolant of nodal ``f``."""
    r, w = op.grid.rule(op.n - 1)
    vals = np.interp(r, op.grid.nodes, np.asarray(f, dtype=float))
    return float((sphere_area(op.n) * np.sum(np.abs(vals) ** t * w)) ** (1.0 / t))


def hls_check(op: RieszOperator, f, g) -> tuple[float, float, float]:
    """(D(f, g), C(n, mu) ||f||_t ||g||_t, ratio) with t = 2n/(2n - mu)."""
    t = 2 * op.n / (2 * op.n - op.mu)
    lhs = riesz_form(op, f, g)
    rhs = hls_constant(op.n, op.mu) * lebesgue_norm(op, f, t) * lebesgue_norm(op, g, t)
    ratio = lhs / rhs if rhs > 0 else 0.0
    return lhs, rhs, ratio


# ---------------------------------------------------------------------------
# Kirchhoff coefficient and nonlinearity


@dataclass(frozen=True)
class KirchhoffModel:
    """m(t) = d0 + d1 t^beta with M its primitive; degenerate when d0 = 0."""

    d0: float = 1.0
    d1: float = 0.0
    beta: float = 0.5

    def __post_init__(self):
        if self.d0 < 0 or self.d1 < 0 or (self.d0 == 0 and self.d1 == 0):
            raise ValueError("need d0, d1 >= 0, not both zero")
        if not -1 < self.beta < 1:
            raise ValueError("need -1 < beta < 1")

    @property
    def degenerate(self) -> bool:
        return self.d0 == 0

    def m(self, t):
        t = np.asarray(t, dtype=float)
        return self.d0 + (self.d1 * t**self.beta if self.d1 else 0.0 * t)

    def dm(self, t):
        t = np.asarray(t, dtype=float)
        if not self.d1:
            return 0.0 * t
        return self.d1 * self.beta * t ** (self.beta - 1.0)

    def M(self, t):
        t = np.asarray(t, dtype=float)
        return self.d0 * t + (self.d1 * t ** (self.beta + 1.0) / (self.beta + 1.0) if self.d1 else 0.0 * t)

    @property
    def growth_exponent(self) -> float:
        """r in m(t) <= c1 + c2 t^r for large t."""
        return max(self.beta, 0.0) if self.d1 else 0.0

    @property
    def degeneracy_exponent(self) -> float | None:
        """z in m(t) >= t^z (degenerate branch only, taking d1 >= 1 scaling into account)."""
        return self.beta if self.degenerate else None


def check_m3(model: KirchhoffModel, samples: int = 400) -> bool:
    """t -> m(t)/t non-increasing on a log grid of (1e-6, 1e6)."""
    t = np.logspace(-6, 6, samples)
    q = model.m(t) / t
    return bool(np.all(np.diff(q) <= 1e-12 * np.abs(q[:-1])))


_LOG_CAP = 700.0


@dataclass(frozen=True)
class NonlinearityModel:
    """F(t, s) = (t+ s+)^a exp(t+^{n/(n-1)} + s+^{n/(n-1)})."""

    a: float = 3.0
    n: int = 2

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("power exponent a must be >= 0")
        if self.n < 2:
            raise ValueError("n must be >= 2")

    @property
    def q(self) -> float:
        return self.n / (self.n - 1)

    @classmethod
    def default(cls, n: int = 2, kirchhoff: KirchhoffModel | None = None) -> "NonlinearityModel":
        """Smallest integer a with a - 1 >= l for an admissible (f3) exponent l."""
        r = kirchhoff.growth_exponent if kirchhoff else 0.0
        z = kirchhoff.degeneracy_exponent if kirchhoff and kirchhoff.degenerate else None
        l = max(n - 1, n * (r + 1) / 2, n * (z + 1) / 2 if z is not None else 0.0)
        return cls(float(math.floor(l) + 2), n)


def _pos(x):
    return np.maximum(np.asarray(x, dtype=float), 0.0)


def log_F(model: NonlinearityModel, t, s):
    """log F, -inf off the open positive quadrant."""
    tp, sp = _pos(t), _pos(s)
    with np.errstate(divide="ignore"):
        lt, ls = np.log(tp), np.log(sp)
    inside = (tp > 0) & (sp > 0)
    val = model.a * (lt + ls) + tp**model.q + sp**model.q
    if model.a == 0:
        val = tp**model.q + sp**model.q
    return np.where(inside, val, -np.inf)


def _exp_guard(x):
    return np.exp(np.minimum(x, _LOG_CAP))


def F_eval(model: NonlinearityModel, t, s):
    return _exp_guard(log_F(model, t, s))


def _h1(model, t, s):
    tp, sp = _pos(t), _pos(s)
    a, q = model.a, model.q
    inside = (tp > 0) & (sp > 0)
    tt = np.where(inside, tp, 1.0)
    ss = np.where(inside, sp, 1.0)
    val = (a * tt ** (a - 1.0) + q * tt ** (a + q - 1.0)) * ss**a
    return np.where(inside, val, 0.0)


def _expo(model, t, s):
    return _pos(t) ** model.q + _pos(s) ** model.q


def f1_eval(model: NonlinearityModel, t, s):
    """dF/dt = h1 exp(t^q + s^q) with h1 = a t^{a-1} s^a + q t^{a+1/(n-1)} s^a."""
    h = _h1(model, t, s)
    with np.errstate(divide="ignore"):
        return np.where(h > 0, _exp_guard(np.log(np.where(h > 0, h, 1.0)) + _expo(model, t, s)), 0.0)


def f2_eval(model: NonlinearityModel, t, s):
    return f1_eval(model, s, t)


def check_f3(model: NonlinearityModel, l: float, samples: int = 200) -> bool:
    """t -> f1(t, s)/t^l increasing on a log grid, for several s."""
    t = np.logspace(-3, 0.7, samples)
    for s in (1e-2, 0.1, 0.5, 1.0, 2.0):
        with np.errstate(divide="ignore"):
            g = np.log(f1_eval(model, t, s)) - l * np.log(t)
        if not np.all(np.diff(g) > 0):
            return False
    return True


def check_f5(model: NonlinearityModel, gamma: float | None = None, samples: int = 60) -> bool:
    """f_i / (t^gamma + s^gamma) -> 0 at the origin and F(t, s) -> F(0, 0) = 0.

    Sampled along rays s = c t and along curved paths s = t^2, t = s^2.
    """
    n = model.n
    if gamma is None:
        gamma = (n - 2) / 2 + 0.05
    if gamma <= (n - 2) / 2:
        raise ValueError("gamma must exceed (n-2)/2")
    x = np.logspace(-8, -2, samples)
    paths = [(x, c * x) for c in (0.1, 1.0, 10.0)] + [(x, x**2), (x**2, x)]
    for t, s in paths:
        denom = t**gamma + s**gamma
        r1 = f1_eval(model, t, s) / denom
        r2 = f2_eval(model, t, s) / denom
        if r1[0] > 1e-3 or r2[0] > 1e-3 or F_eval(model, t, s)[0] > 1e-6:
            return False
    return True


@dataclass
class GrowthReport:
    eps: float
    k_exp: float
    p_exp: float
    C1: float
    C2: float
    holds: bool
    worst_ratio: float
    checked: int


def growth_bound_check(model: NonlinearityModel, eps: float, k_exp: float, p_exp: float = 1.0,
                       trials: int = 10_000, seed: int = 0, t_max: float = 4.0) -> GrowthReport:
    """Fit C1, C2 with F <= C1(s^k + t^k) + C2(s^p + t^p) exp((1+eps)(s^q + t^q)).

    Constants are fitted on one random sample of [0, t_max]^2 (with extra
    points near the origin) and validated on an independent one.
    """
    if k_exp < 1:
        raise ValueError("k_exp must be >= 1")
    rng = np.random.default_rng(seed)
    q = model.q

    def sample(size):
        t = np.concatenate([rng.uniform(0, t_max, size), np.exp(rng.uniform(np.log(1e-6), 0, size))])
        s = np.concatenate([rng.uniform(0, t_max, size), np.exp(rng.uniform(np.log(1e-6), 0, size))])
        return t, s

    def terms(t, s):
        return t**k_exp + s**k_exp, (t**p_exp + s**p_exp) * np.exp((1 + eps) * (t**q + s**q))

    t, s = sample(trials)
    F = F_eval(model, t, s)
    small, big = terms(t, s)
    near = np.hypot(t, s) < 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        c1 = np.max(np.where(near & (small > 0), F / small, 0.0))
        c2 = np.max(np.where(~near & (big > 0), F / big, 0.0))
    if not (np.isfinite(c1) and np.isfinite(c2)):
        raise GrowthFitFailure("no finite constants bound the samples")
    # a maximiser at the outer edge means the ratio is still growing: (f2) violated
    edge = (~near) & (np.maximum(t, s) > 0.95 * t_max)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_edge = np.max(np.where(edge, F / big, 0.0), initial=0.0)
    if c2 > 0 and ratio_edge >= c2 * (1 - 1e-12) and model.a > 0:
        raise GrowthFitFailure("F / bound still increasing at the edge of the sample range")
    C1, C2 = 1.1 * c1, 1.1 * c2
    tv, sv = sample(trials // 2)
    Fv = F_eval(model, tv, sv)
    sm, bg = terms(tv, sv)
    bound = C1 * sm + C2 * bg
    with np.errstate(divide="ignore", invalid="ignore"):
        worst = float(np.max(np.where(bound > 0, Fv / bound, 0.0)))
    holds = bool(np.all(Fv <= bound))
    return GrowthReport(eps, k_exp, p_exp, float(C1), float(C2), holds, worst, int(tv.size))


def f_hessian(model: NonlinearityModel, t, s):
    """Second partials (F_tt, F_ts, F_ss), zero off the open positive quadrant."""
    tp, sp = _pos(t), _pos(s)
    inside = (tp > 0) & (sp > 0)
    tt = np.where(inside, tp, 1.0)
    ss = np.where(inside, sp, 1.0)
    a, q = model.a, model.q
    # F = P(t) P(s) e^{E} with P(x) = x^a; write f1 = A(t) s^a e^E, A(t) = a t^{a-1} + q t^{a+q-1}
    At = a * tt ** (a - 1.0) + q * tt ** (a + q - 1.0)
    As = a * ss ** (a - 1.0) + q * ss ** (a + q - 1.0)
    dAt = a * (a - 1.0) * tt ** (a - 2.0) + q * (a + q - 1.0) * tt ** (a + q - 2.0)
    dAs = a * (a - 1.0) * ss ** (a - 2.0) + q * (a + q - 1.0) * ss ** (a + q - 2.0)
    e = _exp_guard(_expo(model, tt, ss))
    ftt = (dAt + At * q * tt ** (q - 1.0)) * ss**a * e
    fss = (dAs + As * q * ss ** (q - 1.0)) * tt**a * e
    fts = At * As * e
    zero = np.zeros_like(ftt)
    return tuple(np.where(inside, x, zero) for x in (ftt, fts, fss))
