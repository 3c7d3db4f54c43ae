"""Command line front end: constants, blow-up sweeps, check suites and the solver.

Exit codes: 0 success, 1 check or solver failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from .checks import DEFAULT_SEED, SUITES, run_suite
from .functionals import blowup_sweep
from .kcs import (
    SolverOptions,
    default_init,
    dirichlet_energy,
    level_bound,
    make_problem,
    ray_profile,
    run_report,
    solve_kcs,
    verify_weak_solution,
    write_solution_csv,
)
from .radial import make_grid
from .special import DimensionParams, sharp_constants

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return "" if x is None else str(x)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _parse_list(spec: str, integer: bool = False) -> list[float]:
    """'a,b,c' or 'start:stop' (integers, inclusive) or 'start:stop:count' (linear)."""
    try:
        if ":" in spec:
            parts = [float(x) for x in spec.split(":")]
            if len(parts) == 2:
                lo, hi = int(parts[0]), int(parts[1])
                return [float(k) for k in range(lo, hi + 1)]
            if len(parts) == 3:
                return list(np.linspace(parts[0], parts[1], int(parts[2])))
            raise ValueError
        vals = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse list {spec!r}") from None
    if integer and any(v != int(v) for v in vals):
        raise UsageError("expected integers")
    return vals


# ---------------------------------------------------------------------------


def cmd_constants(args) -> int:
    try:
        dims = DimensionParams(args.n, args.m)
        if dims.m >= dims.n:
            raise ValueError("need m < n")
        c = sharp_constants(args.n, args.m, args.lam, args.mu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    fields = {"n": args.n, "m": args.m, "lambda": args.lam, "mu": args.mu, "omega": c.omega,
              "alpha_n": c.alpha_n, "zeta": c.zeta_nm, "two_nm": c.two_nm, "kappa": c.kappa,
              "hls_c": c.hls_c}
    if args.format == "json":
        _emit(_dump_json({"command": "constants", **fields}), args.output)
    else:
        _emit(_csv_text(["name", "value"], [(k, v) for k, v in fields.items() if v is not None]), args.output)
    return EXIT_OK


def cmd_blowup(args) -> int:
    if not 0 <= args.lam < args.n:
        raise UsageError("need 0 <= lambda < n")
    if args.epsilon < 0:
        raise UsageError("epsilon must be >= 0")
    ks = _parse_list(args.k_list)
    grid = make_grid(args.R, args.points, args.grading)
    try:
        res = blowup_sweep(args.epsilon, args.lam, args.n, ks, grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    summary = {"epsilon": res.epsilon, "lambda": res.lam, "fitted_slope": res.slope,
               "expected_lower_bound": res.expected_lower_bound, "pass": res.passed,
               "bounded": res.bounded, "tail_ratio": res.ratio, "theta": res.theta}
    rows = [(r.k, r.value, r.log_value, r.overflow, r.overflow_radius) for r in res.rows]
    if args.format == "json":
        _emit(_dump_json({"command": "blowup", "summary": summary,
                          "rows": [dict(zip(("k", "value", "log_value", "overflow", "overflow_radius"), r))
                                   for r in rows]}), args.output)
    else:
        text = _csv_text(["k", "value", "log_value", "overflow", "overflow_radius"], rows)
        text += "\n" + _csv_text(list(summary), [list(summary.values())])
        _emit(text, args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    if args.trials is not None and args.trials < 1:
        raise UsageError("trials must be positive")
    rep = run_suite(args.suite, args.seed, args.trials)
    if args.format == "json":
        _emit(_dump_json({"command": "check", **rep.as_dict()}), args.output)
    else:
        rows = [("suite", rep.suite), ("seed", rep.seed), ("trials", rep.trials), ("passed", rep.passed)]
        rows += list(rep.summary.items())
        text = _csv_text(["name", "value"], rows)
        if rep.failures:
            text += "\n" + _dump_json({"failures": rep.failures})
        _emit(text, args.output)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _problem(args):
    if not 0 < args.mu < args.n:
        raise UsageError("need 0 < mu < n")
    if args.n < 2:
        raise UsageError("need n >= 2")
    try:
        return make_problem(args.n, args.mu, args.R, args.d0, args.d1, args.beta, args.a,
                            args.points, args.grading, args.angular_order, args.cache_dir)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_solve(args) -> int:
    prob = _problem(args)
    opts = SolverOptions(grad_tol=args.grad_tol, max_iter=args.max_iter)
    try:
        state = solve_kcs(prob, options=opts)
    except Exception as exc:  # solver failures carry their own diagnostics
        report = {"command": "solve", "status": "failed", "error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(_dump_json(report))
        if args.report:
            _emit(_dump_json(report), args.report)
        return EXIT_FAIL
    residual = verify_weak_solution(prob, state, args.tests, args.seed)
    report = {"command": "solve", "status": "ok", **run_report(prob, state, residual)}
    report["below_level_bound"] = 0.0 < state.energy < report["level_bound"]
    if args.output:
        write_solution_csv(args.output, prob, state)
    text = _dump_json(report)
    if args.report:
        _emit(text, args.report)
    if args.format == "json" or not args.output:
        sys.stdout.write(text)
    ok = state.converged and residual.passed and report["below_level_bound"]
    return EXIT_OK if ok else EXIT_FAIL


def cmd_ray_profile(args) -> int:
    prob = _problem(args)
    U, V = default_init(prob)
    s = dirichlet_energy(prob, U, V) ** (1.0 / prob.n)
    U, V = U / s, V / s
    xis = _parse_list(args.xi)
    rows = ray_profile(prob, U, V, xis)
    first_negative = next((r.xi for r in rows if r.xi > 0 and r.energy < 0), None)
    summary = {"level_bound": level_bound(prob), "first_negative_xi": first_negative,
               "kirchhoff_branch": "degenerate" if prob.kirchhoff.degenerate else "nondegenerate"}
    if args.format == "json":
        _emit(_dump_json({"command": "ray-profile", "summary": summary,
                          "rows": [{"xi": r.xi, "energy": r.energy, "overflow": r.overflow} for r in rows]}),
              args.output)
    else:
        _emit(_csv_text(["xi", "energy", "overflow"], [(r.xi, r.energy, r.overflow) for r in rows]),
              args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _model_flags(p):
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--d0", type=float, default=1.0)
    p.add_argument("--d1", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--a", type=float, default=None, help="power exponent of h (default: smallest safe integer)")
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--grading", type=float, default=1.0)
    p.add_argument("--angular-order", type=int, default=8)
    p.add_argument("--cache-dir", default=None, help="directory for cached Riesz matrices")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtproduct", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default=None, help="output path (default: stdout)")
        return p

    p = add("constants", cmd_constants, "sharp constants for (n, m, lambda, mu)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=None)

    p = add("blowup", cmd_blowup, "functional along the Moser pair sequence above/at the threshold")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--epsilon", type=float, default=0.25)
    p.add_argument("--k-list", default="16:256", help="'a,b,c' or inclusive integer range 'lo:hi'")
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--grading", type=float, default=1.05)

    p = add("check", cmd_check, "randomized verification suites")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=None)

    p = add("solve", cmd_solve, "ground state of the Kirchhoff Choquard system")
    _model_flags(p)
    p.add_argument("--grad-tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--tests", type=int, default=32, help="random test pairs for the residual")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--report", default=None, help="JSON run report path")

    p = add("ray-profile", cmd_ray_profile, "energy along the ray through the unit-norm initial bump")
    _model_flags(p)
    p.add_argument("--xi", default="0:6:25", help="'a,b,c' or 'start:stop:count'")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            return args.func(args)
        except UsageError as exc:
            parser.exit(EXIT_USAGE, f"{parser.prog} {args.command}: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
