"""Ground states of the radial n-Kirchhoff Choquard system on a ball.

Unknowns are nodal values of piecewise linear (u, v) on a RadialGrid, with
the outer node clamped to zero.  The discrete energy is

    J(U, V) = (1/n) M(S) - (1/2) D(F, F),    S = ||grad u||_n^n + ||grad v||_n^n,

where F is the nodal interpolant of F(U_i, V_i) and D is the Riesz Galerkin
form.  Ground states are found by minimising J over the Nehari set
<J'(W), W> = 0: every iterate is pulled back to the set along its ray, a
stiffness-preconditioned descent step with Armijo backtracking moves along
it, and a Newton polish on J' = 0 finishes the job.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg
from scipy.optimize import brentq

from .choquard import (
    F_eval,
    KirchhoffModel,
    NonlinearityModel,
    RieszOperator,
    build_riesz,
    f1_eval,
    f2_eval,
    f_hessian,
    log_F,
)
from .functionals import LOG_OVERFLOW
from .radial import RadialGrid, UnsupportedOrder, make_grid
from .special import DimensionParams, alpha_n, sphere_area, two_nm

__all__ = [
    "KCSProblem",
    "SolverOptions",
    "SolverState",
    "NoNehariRoot",
    "DegenerateRay",
    "NonUnimodalRay",
    "MaxIterations",
    "LineSearchFailure",
    "EnergyOverflow",
    "make_problem",
    "default_init",
    "energy",
    "gradient",
    "nehari_function",
    "nehari_project",
    "solve",
    "solve_kcs",
    "level_bound",
    "verify_weak_solution",
    "ray_profile",
    "write_solution_csv",
    "run_report",
]

T_MAX = 1e6


class NoNehariRoot(RuntimeError):
    """<J'(tW), tW> stays positive up to t_max: the nonlinearity is too weak on this ray."""


class DegenerateRay(RuntimeError):
    """F vanishes identically along the ray (u v has no positive overlap)."""


class NonUnimodalRay(RuntimeError):
    """The fibering map t -> J(tW) is not increasing-then-decreasing."""


class MaxIterations(RuntimeError):
    pass


class LineSearchFailure(RuntimeError):
    pass


class EnergyOverflow(ArithmeticError):
    """The exponential in F left the floating point range."""


@dataclass(frozen=True, eq=False)
class KCSProblem:
    kirchhoff: KirchhoffModel
    nonlinearity: NonlinearityModel
    riesz: RieszOperator
    dims: DimensionParams = DimensionParams(2, 1)

    def __post_init__(self):
        if self.dims.m != 1:
            raise UnsupportedOrder("the Kirchhoff Choquard solver is first order (m = 1)")
        if not (self.riesz.n == self.nonlinearity.n == self.dims.n):
            raise ValueError("dimension mismatch between Riesz operator, nonlinearity and dims")
        if not 0 < self.riesz.mu < self.dims.n:
            raise ValueError("need 0 < mu < n")

    @property
    def grid(self) -> RadialGrid:
        return self.riesz.grid

    @property
    def n(self) -> int:
        return self.dims.n

    @property
    def mu(self) -> float:
        return self.riesz.mu

    @property
    def R(self) -> float:
        return self.grid.R

    @property
    def size(self) -> int:
        """Number of free (interior) nodes; the node at r = R is clamped."""
        return self.grid.size - 1

    @cached_property
    def cell_volume(self) -> np.ndarray:
        a, b = self.grid.nodes[:-1], self.grid.nodes[1:]
        return sphere_area(self.n) * (b**self.n - a**self.n) / self.n

    @cached_property
    def _stiffness_banded(self) -> np.ndarray:
        # upper banded form of sum_e c_e / h_e^2 (e_i - e_j)(e_i - e_j)^T on free nodes
        w = self.cell_volume / self.grid.widths**2
        diag = np.zeros(self.grid.size)
        diag[:-1] += w
        diag[1:] += w
        ab = np.zeros((2, self.size))
        ab[1] = diag[:-1]
        ab[0, 1:] = -w[:-1]
        return ab

    def precondition(self, g: np.ndarray) -> np.ndarray:
        return linalg.solveh_banded(self._stiffness_banded, g)


def make_problem(n: int = 2, mu: float = 1.0, R: float = 1.0, d0: float = 1.0, d1: float = 0.0,
                 beta: float = 0.5, a: float | None = None, node_count: int = 512, grading: float = 1.0,
                 angular_order: int = 8, cache_dir=None) -> KCSProblem:
    """Problem with the default nonlinearity; ``a`` defaults to the smallest safe integer."""
    kirchhoff = KirchhoffModel(d0, d1, beta)
    nonlin = NonlinearityModel.default(n, kirchhoff) if a is None else NonlinearityModel(float(a), n)
    grid = make_grid(R, node_count, grading)
    riesz = build_riesz(mu, n, grid, angular_order, cache_dir=cache_dir)
    return KCSProblem(kirchhoff, nonlin, riesz, DimensionParams(n, 1))


def _full(prob: KCSProblem, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape == (prob.size,):
        return np.append(X, 0.0)
    if X.shape == (prob.grid.size,):
        out = X.copy()
        out[-1] = 0.0
        return out
    raise ValueError(f"nodal array must have {prob.size} or {prob.grid.size} entries, got {X.shape}")


def _dirichlet(prob: KCSProblem, X: np.ndarray):
    """(int |x'|^n, gradient wrt all nodes) for nodal X."""
    n = prob.n
    h = prob.grid.widths
    g = np.diff(X) / h
    S = float(np.sum(prob.cell_volume * np.abs(g) ** n))
    d = n * prob.cell_volume * np.abs(g) ** (n - 2) * g / h
    grad = np.zeros(X.size)
    grad[:-1] -= d
    grad[1:] += d
    return S, grad


def _check_overflow(prob, U, V):
    lf = log_F(prob.nonlinearity, U, V)
    peak = np.max(lf)
    if peak > LOG_OVERFLOW:
        i = int(np.argmax(lf))
        raise EnergyOverflow(f"log F = {peak:.1f} at r = {prob.grid.nodes[i]:.6g}")


def dirichlet_energy(prob: KCSProblem, U, V) -> float:
    """S = ||(u, v)||^n for the piecewise linear interpolants."""
    return _dirichlet(prob, _full(prob, U))[0] + _dirichlet(prob, _full(prob, V))[0]


def energy(prob: KCSProblem, U, V) -> float:
    U, V = _full(prob, U), _full(prob, V)
    _check_overflow(prob, U, V)
    S = _dirichlet(prob, U)[0] + _dirichlet(prob, V)[0]
    F = F_eval(prob.nonlinearity, U, V)
    return float(prob.kirchhoff.M(S)) / prob.n - 0.5 * float(F @ prob.riesz.matrix @ F)


def _gradient_full(prob, U, V):
    SU, dU = _dirichlet(prob, U)
    SV, dV = _dirichlet(prob, V)
    S = SU + SV
    F = F_eval(prob.nonlinearity, U, V)
    AF = prob.riesz.matrix @ F
    m = float(prob.kirchhoff.m(S)) if S > 0 else float(prob.kirchhoff.d0)
    gU = m / prob.n * dU - AF * f1_eval(prob.nonlinearity, U, V)
    gV = m / prob.n * dV - AF * f2_eval(prob.nonlinearity, U, V)
    return gU[:-1], gV[:-1], S, m


def gradient(prob: KCSProblem, U, V) -> tuple[np.ndarray, np.ndarray]:
    """Partial derivatives of the discrete energy at the free nodes."""
    U, V = _full(prob, U), _full(prob, V)
    _check_overflow(prob, U, V)
    gU, gV, _, _ = _gradient_full(prob, U, V)
    return gU, gV


def hessian(prob: KCSProblem, U, V) -> np.ndarray:
    """Dense Hessian of J on the free nodes, ordered (U, V)."""
    U, V = _full(prob, U), _full(prob, V)
    n, N = prob.n, prob.size
    h = prob.grid.widths
    blocks = []
    dS = []
    for X in (U, V):
        g = np.diff(X) / h
        w = n * (n - 1) * prob.cell_volume * np.abs(g) ** (n - 2) / h**2
        H = np.zeros((N + 1, N + 1))
        i = np.arange(N)
        H[i, i] += w
        H[i + 1, i + 1] += w
        H[i, i + 1] -= w
        H[i + 1, i] -= w
        blocks.append(H[:-1, :-1])
        dS.append(_dirichlet(prob, X)[1][:-1])
    S = dirichlet_energy(prob, U, V)
    km = prob.kirchhoff
    m, dm = float(km.m(S)), float(km.dm(S)) if S > 0 else 0.0
    g = np.concatenate(dS)
    HK = dm * np.outer(g, g)
    HK[:N, :N] += m * blocks[0]
    HK[N:, N:] += m * blocks[1]
    HK /= n

    model = prob.nonlinearity
    F = F_eval(model, U, V)
    A = prob.riesz.matrix
    AF = (A @ F)[:-1]
    Ai = A[:-1, :-1]
    f1 = f1_eval(model, U, V)[:-1]
    f2 = f2_eval(model, U, V)[:-1]
    ftt, fts, fss = (x[:-1] for x in f_hessian(model, U, V))
    HC = np.empty((2 * N, 2 * N))
    HC[:N, :N] = Ai * np.outer(f1, f1) + np.diag(AF * ftt)
    HC[:N, N:] = Ai * np.outer(f1, f2) + np.diag(AF * fts)
    HC[N:, :N] = HC[:N, N:].T
    HC[N:, N:] = Ai * np.outer(f2, f2) + np.diag(AF * fss)
    return HK - HC


# ---------------------------------------------------------------------------
# Nehari projection


def nehari_function(prob: KCSProblem, U, V, t: float) -> float:
    """phi(t) = <J'(tU, tV), (tU, tV)>; -inf once F overflows along the ray."""
    U, V = _full(prob, U), _full(prob, V)
    tU, tV = t * U, t * V
    if np.max(log_F(prob.nonlinearity, tU, tV)) > LOG_OVERFLOW:
        return -math.inf
    S = dirichlet_energy(prob, tU, tV)
    model = prob.nonlinearity
    F = F_eval(model, tU, tV)
    with np.errstate(over="ignore", invalid="ignore"):
        AF = prob.riesz.matrix @ F
        val = float(prob.kirchhoff.m(S)) * S - float(AF @ (f1_eval(model, tU, tV) * tU + f2_eval(model, tU, tV) * tV))
    return val if math.isfinite(val) else -math.inf


def nehari_project(prob: KCSProblem, U, V, rtol: float = 1e-10, t_max: float = T_MAX,
                   verify: bool = False, samples: int = 200) -> float:
    """t* > 0 with phi(t*) = 0: geometric bracketing, then a bracketed root solve.

    With ``verify`` the fibering map is sampled on ``samples`` log-spaced t's
    and must increase before t* and decrease after it.
    """
    Uf, Vf = _full(prob, U), _full(prob, V)
    if not np.any((Uf > 0) & (Vf > 0)):
        raise DegenerateRay("u and v have no common positive support")

    def phi(t):
        return nehari_function(prob, Uf, Vf, t)

    lo = hi = 1.0
    if phi(1.0) > 0:
        while phi(hi) > 0:
            lo, hi = hi, 2.0 * hi
            if hi > t_max:
                raise NoNehariRoot(f"phi(t) > 0 up to t_max = {t_max:g}")
    else:
        while phi(lo) <= 0:
            hi, lo = lo, 0.5 * lo
            if lo < 1e-300:
                raise DegenerateRay("phi(t) <= 0 arbitrarily close to 0")
    if hi / lo > 1.0 + rtol:
        # phi may be -inf near the top of the bracket; tighten it by bisection first
        while not math.isfinite(phi(hi)) and hi / lo > 1.0 + rtol:
            mid = math.sqrt(lo * hi)
            lo, hi = (mid, hi) if phi(mid) > 0 else (lo, mid)
        if hi / lo > 1.0 + rtol:
            t_star = brentq(phi, lo, hi, xtol=1e-300, rtol=max(rtol * 1e-2, 4 * np.finfo(float).eps))
        else:
            t_star = math.sqrt(lo * hi)
    else:
        t_star = math.sqrt(lo * hi)
    if verify:
        ts = t_star * np.logspace(-2, math.log10(min(50.0, t_max / t_star)), samples)
        sign = np.array([phi(t) for t in ts])
        before, after = sign[ts < t_star * (1 - 1e-6)], sign[ts > t_star * (1 + 1e-6)]
        if np.any(before < 0) or np.any(after > 0):
            raise NonUnimodalRay("phi changes sign more than once along the ray")
    return float(t_star)


# ---------------------------------------------------------------------------
# Solver


@dataclass
class SolverOptions:
    grad_tol: float = 1e-8
    nehari_tol: float = 1e-10
    max_iter: int = 10_000
    newton: bool = True
    newton_switch: float = 1e-2
    newton_max: int = 40
    armijo: float = 1e-4
    norm_floor: float = 1e-3


@dataclass
class SolverState:
    U: np.ndarray
    V: np.ndarray
    energy: float
    grad_norm: float
    grad_norm0: float
    nehari_residual: float
    iterations: int = 0
    newton_iterations: int = 0
    backtracks: int = 0
    converged: bool = False
    history: list = field(default_factory=list)

    @property
    def relative_grad(self) -> float:
        return self.grad_norm / self.grad_norm0 if self.grad_norm0 > 0 else 0.0

    @property
    def positive(self) -> bool:
        return bool(np.all(self.U > 0) and np.all(self.V > 0))


def default_init(prob: KCSProblem) -> tuple[np.ndarray, np.ndarray]:
    """U = V = (1 - r/R)_+^2 at the free nodes."""
    r = prob.grid.nodes[:-1]
    b = (1.0 - r / prob.R) ** 2
    return b.copy(), b.copy()


def _dual_norm(prob, gU, gV) -> float:
    return math.sqrt(max(float(gU @ prob.precondition(gU) + gV @ prob.precondition(gV)), 0.0))


def _state(prob, U, V, g0, **kw) -> SolverState:
    gU, gV = gradient(prob, U, V)
    return SolverState(U, V, energy(prob, U, V), _dual_norm(prob, gU, gV), g0,
                       abs(nehari_function(prob, U, V, 1.0)), **kw)


def solve_kcs(prob: KCSProblem, init=None, options: SolverOptions | None = None) -> SolverState:
    """Minimise J over the Nehari set and polish to a critical point."""
    opt = options or SolverOptions()
    U, V = default_init(prob) if init is None else (np.asarray(init[0], float), np.asarray(init[1], float))
    U, V = np.maximum(_full(prob, U)[:-1], 0.0), np.maximum(_full(prob, V)[:-1], 0.0)
    t = nehari_project(prob, U, V, opt.nehari_tol)
    U, V = t * U, t * V
    E = energy(prob, U, V)
    gU, gV = gradient(prob, U, V)
    g0 = _dual_norm(prob, gU, gV)
    history = [E]
    step, backtracks, it = 1.0, 0, 0
    gnorm = g0
    while it < opt.max_iter and gnorm > opt.grad_tol * g0 and not (opt.newton and gnorm <= opt.newton_switch * g0):
        dU, dV = -prob.precondition(gU), -prob.precondition(gV)
        slope = -gnorm**2
        while True:
            tU, tV = np.maximum(U + step * dU, 0.0), np.maximum(V + step * dV, 0.0)
            try:
                ts = nehari_project(prob, tU, tV, opt.nehari_tol)
                tU, tV = ts * tU, ts * tV
                if dirichlet_energy(prob, tU, tV) ** (1 / prob.n) < opt.norm_floor:
                    raise DegenerateRay("iterate collapsed below the norm floor")
                Et = energy(prob, tU, tV)
            except (DegenerateRay, NoNehariRoot, EnergyOverflow):
                Et = math.inf
            if Et <= E + opt.armijo * step * slope:
                break
            step *= 0.5
            backtracks += 1
            if step < 1e-14:
                raise LineSearchFailure(f"no descent at iteration {it}, relative gradient {gnorm / g0:.3e}")
        U, V, E = tU, tV, Et
        history.append(E)
        step = min(2.0 * step, 4.0)
        gU, gV = gradient(prob, U, V)
        gnorm = _dual_norm(prob, gU, gV)
        it += 1
    newton_it = 0
    if opt.newton:
        while gnorm > opt.grad_tol * g0:
            if newton_it >= opt.newton_max:
                break
            H = hessian(prob, U, V)
            delta = linalg.solve(H, -np.concatenate([gU, gV]), assume_a="sym")
            N = prob.size
            lam = 1.0
            while lam > 1e-4:
                nU, nV = U + lam * delta[:N], V + lam * delta[N:]
                try:
                    ngU, ngV = gradient(prob, nU, nV)
                    ng = _dual_norm(prob, ngU, ngV)
                except EnergyOverflow:
                    ng = math.inf
                if ng < gnorm:
                    break
                lam *= 0.5
            else:
                break
            U, V, gU, gV, gnorm = nU, nV, ngU, ngV, ng
            newton_it += 1
    if gnorm > opt.grad_tol * g0 and it >= opt.max_iter:
        raise MaxIterations(f"relative gradient {gnorm / g0:.3e} after {it} iterations")
    state = _state(prob, U, V, g0, iterations=it, newton_iterations=newton_it, backtracks=backtracks,
                   history=history)
    state.converged = state.grad_norm <= opt.grad_tol * g0
    return state


solve = solve_kcs


def level_bound(prob: KCSProblem) -> float:
    """(1/n) M((((2n - mu)/(2n)) alpha_n / 2_n)^{n-1})."""
    n, mu = prob.n, prob.mu
    arg = ((2 * n - mu) / (2 * n) * alpha_n(n) / two_nm(n, 1)) ** (n - 1)
    return float(prob.kirchhoff.M(arg)) / n


# ---------------------------------------------------------------------------
# Certificates and diagnostics


@dataclass
class ResidualReport:
    max_residual: float
    test_count: int
    positive: bool
    tol: float

    @property
    def passed(self) -> bool:
        return self.positive and self.max_residual <= self.tol


def verify_weak_solution(prob: KCSProblem, state_or_pair, test_count: int = 32, seed: int = 0,
                         tol: float = 1e-6) -> ResidualReport:
    """Weak-form residual against random piecewise linear test pairs.

    Each residual |<J'(u, v), (phi, psi)>| is normalised by
    m(S) ||(u, v)||^{n-1} ||(phi, psi)||.
    """
    if isinstance(state_or_pair, SolverState):
        U, V = state_or_pair.U, state_or_pair.V
    else:
        U, V = state_or_pair
    Uf, Vf = _full(prob, U), _full(prob, V)
    gU, gV = gradient(prob, Uf, Vf)
    S = dirichlet_energy(prob, Uf, Vf)
    scale = float(prob.kirchhoff.m(S)) * S ** ((prob.n - 1) / prob.n) if S > 0 else 0.0
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(test_count):
        phi, psi = rng.standard_normal(prob.size), rng.standard_normal(prob.size)
        num = abs(float(gU @ phi + gV @ psi))
        if num == 0.0:
            continue
        norm = dirichlet_energy(prob, phi, psi) ** (1.0 / prob.n)
        worst = max(worst, num / (scale * norm) if scale > 0 else math.inf)
    positive = bool(np.all(Uf[:-1] > 0) and np.all(Vf[:-1] > 0))
    return ResidualReport(worst, test_count, positive, tol)


@dataclass(frozen=True)
class RayRow:
    xi: float
    energy: float
    overflow: bool


def ray_profile(prob: KCSProblem, U, V, xi_list) -> list[RayRow]:
    """J(xi U, xi V) along the ray; rows past the exponential range are flagged."""
    U, V = _full(prob, U), _full(prob, V)
    rows = []
    for xi in xi_list:
        try:
            rows.append(RayRow(float(xi), energy(prob, xi * U, xi * V), False))
        except EnergyOverflow:
            rows.append(RayRow(float(xi), -math.inf, True))
    return rows


def write_solution_csv(path, prob: KCSProblem, state: SolverState) -> None:
    """Columns r, u, v (including the clamped node at R), 17 significant digits."""
    U, V = _full(prob, state.U), _full(prob, state.V)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "u", "v"])
        for r, u, v in zip(prob.grid.nodes, U, V):
            w.writerow([f"{r:.17g}", f"{u:.17g}", f"{v:.17g}"])


def run_report(prob: KCSProblem, state: SolverState, residual: ResidualReport) -> dict:
    km, nl = prob.kirchhoff, prob.nonlinearity
    return {
        "energy": state.energy,
        "level_bound": level_bound(prob),
        "residual": residual.max_residual,
        "residual_passed": residual.passed,
        "positive": state.positive,
        "converged": state.converged,
        "relative_gradient": state.relative_grad,
        "nehari_residual": state.nehari_residual,
        "iterations": state.iterations,
        "newton_iterations": state.newton_iterations,
        "model": {
            "n": prob.n,
            "mu": prob.mu,
            "R": prob.R,
            "d0": km.d0,
            "d1": km.d1,
            "beta": km.beta,
            "kirchhoff_branch": "degenerate" if km.degenerate else "nondegenerate",
            "a": nl.a,
            "node_count": prob.grid.size,
            "grading": prob.grid.grading,
            "angular_order": prob.riesz.angular_order,
        },
    }
