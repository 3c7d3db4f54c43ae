import math
import warnings

import numpy as np
import pytest

from mtproduct.kcs import (
    DegenerateRay,
    EnergyOverflow,
    KCSProblem,
    MaxIterations,
    NoNehariRoot,
    SolverOptions,
    default_init,
    dirichlet_energy,
    energy,
    gradient,
    hessian,
    level_bound,
    make_problem,
    nehari_function,
    nehari_project,
    ray_profile,
    run_report,
    solve,
    verify_weak_solution,
    write_solution_csv,
)
from mtproduct.radial import UnsupportedOrder
from mtproduct.special import DimensionParams


def random_state(rng, prob, scale=1.0):
    r = prob.grid.nodes[:-1]
    U = scale * (1 - r) * rng.uniform(0.3, 1.2) * (1 + 0.3 * rng.standard_normal(r.size) ** 2)
    V = scale * (1 - r**2) * rng.uniform(0.3, 1.2) * (1 + 0.3 * rng.standard_normal(r.size) ** 2)
    return U, V


def fd_gradient(prob, U, V, h=1e-6):
    W = np.concatenate([U, V])
    N = U.size
    out = np.empty_like(W)
    for i in range(W.size):
        e = np.zeros_like(W)
        e[i] = h
        Wp, Wm = W + e, W - e
        out[i] = (energy(prob, Wp[:N], Wp[N:]) - energy(prob, Wm[:N], Wm[N:])) / (2 * h)
    return out


def test_problem_validation(small_problem):
    with pytest.raises(UnsupportedOrder):
        KCSProblem(small_problem.kirchhoff, small_problem.nonlinearity, small_problem.riesz, DimensionParams(4, 2))
    with pytest.raises(ValueError):
        make_problem(mu=2.5, node_count=32)


def test_energy_at_zero(small_problem):
    z = np.zeros(small_problem.size)
    assert energy(small_problem, z, z) == 0.0
    gU, gV = gradient(small_problem, z, z)
    assert not gU.any() and not gV.any()


def test_energy_accepts_full_arrays(small_problem):
    U, V = default_init(small_problem)
    Uf, Vf = np.append(U, 5.0), np.append(V, 5.0)  # the outer node is clamped
    assert energy(small_problem, Uf, Vf) == energy(small_problem, U, V)
    with pytest.raises(ValueError):
        energy(small_problem, U[:-1], V)


def test_mountain_pass_geometry(small_problem):
    U, V = default_init(small_problem)
    assert energy(small_problem, 0.05 * U, 0.05 * V) > 0
    assert energy(small_problem, 4 * U, 4 * V) < 0


def test_energy_overflow_flagged(small_problem):
    U, V = default_init(small_problem)
    with pytest.raises(EnergyOverflow):
        energy(small_problem, 40 * U, 40 * V)


@pytest.mark.parametrize("nodes", [24, 40])
def test_gradient_matches_finite_differences(nodes):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        prob = make_problem(node_count=nodes)
    rng = np.random.default_rng(nodes)
    for _ in range(10):
        U, V = random_state(rng, prob)
        g = np.concatenate(gradient(prob, U, V))
        fd = fd_gradient(prob, U, V)
        assert np.max(np.abs(g - fd)) / np.max(np.abs(g)) < 1e-5


def test_gradient_degenerate_kirchhoff():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        prob = make_problem(node_count=24, d0=0.0, d1=1.0, beta=0.5)
    U, V = random_state(np.random.default_rng(3), prob)
    g = np.concatenate(gradient(prob, U, V))
    assert np.max(np.abs(g - fd_gradient(prob, U, V))) / np.max(np.abs(g)) < 1e-5


def test_directional_derivative_along_ray(small_problem):
    U, V = random_state(np.random.default_rng(5), small_problem)
    gU, gV = gradient(small_problem, U, V)
    h = 1e-3
    J = lambda t: energy(small_problem, t * U, t * V)
    d = (-J(1 + 2 * h) + 8 * J(1 + h) - 8 * J(1 - h) + J(1 - 2 * h)) / (12 * h)
    assert float(gU @ U + gV @ V) == pytest.approx(d, rel=1e-8)
    assert float(gU @ U + gV @ V) == pytest.approx(nehari_function(small_problem, U, V, 1.0), rel=1e-12)


def test_hessian_matches_gradient_differences():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        prob = make_problem(node_count=20, d0=1.0, d1=0.5, beta=0.5)
    U, V = random_state(np.random.default_rng(9), prob)
    H = hessian(prob, U, V)
    assert np.max(np.abs(H - H.T)) <= 1e-10 * np.max(np.abs(H))
    N, h = U.size, 1e-6
    W = np.concatenate([U, V])
    for i in (0, 5, N - 1, N + 3):
        e = np.zeros_like(W)
        e[i] = h
        gp = np.concatenate(gradient(prob, (W + e)[:N], (W + e)[N:]))
        gm = np.concatenate(gradient(prob, (W - e)[:N], (W - e)[N:]))
        assert np.max(np.abs(H[:, i] - (gp - gm) / (2 * h))) < 1e-5 * np.max(np.abs(H[:, i]))


def test_nehari_projection_properties(small_problem):
    U, V = random_state(np.random.default_rng(1), small_problem)
    t = nehari_project(small_problem, U, V, verify=True)
    assert abs(nehari_function(small_problem, t * U, t * V, 1.0)) < 1e-6 * dirichlet_energy(small_problem, t * U, t * V)
    assert nehari_project(small_problem, t * U, t * V) == pytest.approx(1.0, abs=1e-9)
    for c in (0.1, 3.0, 17.0):
        assert nehari_project(small_problem, c * U, c * V) * c == pytest.approx(t, rel=1e-8)


def test_fibering_map_peaks_at_projection(small_problem):
    U, V = default_init(small_problem)
    t = nehari_project(small_problem, U, V)
    ts = np.linspace(0.05, 3 * t, 200)
    J = [energy(small_problem, s * U, s * V) for s in ts]
    assert abs(ts[int(np.argmax(J))] - t) <= ts[1] - ts[0]
    assert energy(small_problem, t * U, t * V) >= max(J) - 1e-12


def test_single_sign_change(small_problem):
    U, V = random_state(np.random.default_rng(2), small_problem)
    t = nehari_project(small_problem, U, V)
    ts = t * np.logspace(-3, np.log10(30), 200)
    signs = np.sign([nehari_function(small_problem, U, V, s) for s in ts])
    assert np.count_nonzero(np.diff(signs)) == 1


def test_nehari_errors(small_problem):
    U, V = default_init(small_problem)
    V2 = np.where(small_problem.grid.nodes[:-1] > 0.5, V, 0.0)
    U2 = np.where(small_problem.grid.nodes[:-1] <= 0.5, U, 0.0)
    with pytest.raises(DegenerateRay):
        nehari_project(small_problem, U2, V2)
    with pytest.raises(NoNehariRoot):
        nehari_project(small_problem, 1e-3 * U, 1e-3 * V, t_max=10.0)


def test_level_bound_values(benchmark, degenerate):
    assert level_bound(benchmark) == pytest.approx(1.5 * math.pi, rel=1e-14)
    assert level_bound(degenerate) == pytest.approx(0.5 * (2 / 3) * (3 * math.pi) ** 1.5, rel=1e-14)


def test_level_bound_increases_as_mu_decreases(small_problem):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        vals = [level_bound(make_problem(mu=mu, node_count=16)) for mu in (1.5, 1.0, 0.5, 0.1)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_benchmark_solution(benchmark, benchmark_state):
    st = benchmark_state
    assert st.converged and st.relative_grad < 1e-8
    assert st.positive
    assert 0 < st.energy < level_bound(benchmark)
    rep = verify_weak_solution(benchmark, st)
    assert rep.passed and rep.max_residual < 1e-6
    # descent phase never increases the projected energy
    assert all(b <= a + 1e-12 for a, b in zip(st.history, st.history[1:]))
    assert st.nehari_residual < 1e-8


def test_symmetric_ground_state_from_asymmetric_start(benchmark, benchmark_state):
    U, V = default_init(benchmark)
    r = benchmark.grid.nodes[:-1]
    st = solve(benchmark, (U * (1 + r), V * (1 - 0.5 * r)))
    assert np.max(np.abs(st.U - st.V)) < 1e-6
    assert st.energy == pytest.approx(benchmark_state.energy, rel=1e-9)


def test_degenerate_kirchhoff_solution(degenerate):
    st = solve(degenerate)
    assert st.converged and st.positive
    assert 0 < st.energy < level_bound(degenerate)
    assert verify_weak_solution(degenerate, st).passed


def test_residual_certificates(benchmark, benchmark_state):
    good = verify_weak_solution(benchmark, benchmark_state)
    bad = verify_weak_solution(benchmark, (benchmark_state.U + 0.01, benchmark_state.V))
    assert bad.max_residual > good.max_residual
    z = np.zeros(benchmark.size)
    zero = verify_weak_solution(benchmark, (z, z))
    assert zero.max_residual == 0.0 and not zero.positive and not zero.passed


def test_max_iterations(small_problem):
    with pytest.raises(MaxIterations):
        solve(small_problem, options=SolverOptions(max_iter=2, newton=False))


def test_ray_profile_shape(small_problem):
    U, V = default_init(small_problem)
    s = dirichlet_energy(small_problem, U, V) ** 0.5
    rows = ray_profile(small_problem, U / s, V / s, [0.0, 0.1, 0.5, 3, 3.5, 4, 40])
    assert rows[0].energy == 0.0
    assert rows[1].energy > 0 and rows[2].energy > 0
    tail = [r.energy for r in rows[3:6]]
    assert all(e < 0 for e in tail) and tail[0] > tail[1] > tail[2]
    assert rows[-1].overflow


def test_csv_and_report(tmp_path, benchmark, benchmark_state):
    path = tmp_path / "sol.csv"
    write_solution_csv(path, benchmark, benchmark_state)
    lines = path.read_text().splitlines()
    assert lines[0] == "r,u,v" and len(lines) == benchmark.grid.size + 1
    assert lines[-1].split(",")[1:] == ["0", "0"]
    r, u, v = (float(x) for x in lines[1].split(","))
    assert u == benchmark_state.U[0]
    rep = run_report(benchmark, benchmark_state, verify_weak_solution(benchmark, benchmark_state))
    assert rep["model"]["kirchhoff_branch"] == "nondegenerate"
    assert rep["level_bound"] == pytest.approx(1.5 * math.pi)


@pytest.mark.slow
def test_refinement_invariance_of_extrapolated_energy():
    """P1 energies converge at O(h^2); Richardson-extrapolated levels agree to < 1e-6."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        E = [solve(make_problem(node_count=N)).energy for N in (512, 1023, 2045)]
    rel = abs(E[1] - E[0]) / E[1]
    assert 1e-6 < rel < 1e-3  # raw energy is not refinement-invariant at this resolution
    assert abs(E[2] - E[1]) / abs(E[1] - E[0]) == pytest.approx(0.25, abs=0.03)
    x1 = (4 * E[1] - E[0]) / 3
    x2 = (4 * E[2] - E[1]) / 3
    assert abs(x2 - x1) / x2 < 1e-6
