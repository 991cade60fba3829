"""Command line front end: generate problems, run solves, check solutions.

Exit codes separate mathematical outcomes from operational failures:

* 0   success (solve: certified optimal)
* 1   check: residuals outside tolerance
* 2   invalid flags or invalid input content
* 3   I/O failure
* 10  solve: certified no optimal solution
* 11  solve: iteration limit
* 12  solve: numerical failure
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import serialize
from .errors import LpMeritError
from .problems import (
    GeneratedProblem,
    HomogeneousPoint,
    PrimalDualPoint,
    generate_optimal_lp,
    generate_unbounded_lp,
    residuals,
)
from .solver import (
    Algorithm,
    SolveStatus,
    SolverConfig,
    solve,
    solve_homogeneous,
)

TRACE_HEADER = "iter,f,grad_norm,mu,nu,alpha,gap,primal_res,dual_res,min_x,min_s,rel_err_x"

_STATUS_EXIT = {
    SolveStatus.OPTIMAL: 0,
    SolveStatus.NO_OPTIMAL_SOLUTION: 10,
    SolveStatus.ITERATION_LIMIT: 11,
    SolveStatus.NUMERICAL_FAILURE: 12,
}

CHECK_TOLERANCE = 1e-6


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_trace(path, trace) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(TRACE_HEADER + "\n")
        for r in trace:
            cells = [
                str(r.k),
                _fmt(r.f),
                _fmt(r.grad_norm),
                _fmt(r.mu),
                _fmt(r.nu),
                _fmt(r.alpha),
                _fmt(r.gap),
                _fmt(r.primal_res),
                _fmt(r.dual_res),
                _fmt(r.min_x),
                _fmt(r.min_s),
                "" if r.rel_err_x is None else _fmt(r.rel_err_x),
            ]
            fh.write(",".join(cells) + "\n")


def _config_document(config: SolverConfig) -> dict:
    return {
        "algorithm": config.algorithm.value,
        "q": config.q,
        "mu_const": config.mu_const,
        "hessian_lipschitz": config.hessian_lipschitz,
        "theta": config.theta,
        "nu0": config.nu0,
        "line_search": config.line_search.value,
        "armijo_c1": config.armijo_c1,
        "armijo_shrink": config.armijo_shrink,
        "max_backtracks": config.max_backtracks,
        "max_iter": config.max_iter,
        "tol_grad": config.tol_grad,
        "tol_f": config.tol_f,
        "tol_no_opt": config.tol_no_opt,
    }


def cmd_gen(args) -> int:
    seed = args.seed
    env_seed = os.environ.get("LPMERIT_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            print(f"error: LPMERIT_SEED must be an integer, got {env_seed!r}", file=sys.stderr)
            return 2
    try:
        if args.kind == "optimal":
            problem = generate_optimal_lp(args.m, args.n, seed)
        else:
            problem = generate_unbounded_lp(args.m, args.n, seed)
    except LpMeritError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        serialize.save_problem(args.out, problem)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {args.kind} problem (m={args.m}, n={args.n}, seed={seed}) to {args.out}")
    return 0


def _load_problem(path) -> GeneratedProblem | int:
    try:
        return serialize.load_problem(path)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return 3
    except (LpMeritError, ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid problem file {path}: {exc}", file=sys.stderr)
        return 2


def cmd_solve(args) -> int:
    problem = _load_problem(args.input)
    if isinstance(problem, int):
        return problem
    algorithm = Algorithm(args.alg)
    if algorithm is Algorithm.LM_ADAPTIVE and args.q is not None and args.q != 3.0:
        print(
            f"warning: the unit Lipschitz bound backing the adaptive schedule "
            f"holds for q = 3; running with q = {args.q} anyway",
            file=sys.stderr,
        )
    try:
        config = SolverConfig(
            algorithm=algorithm,
            q=args.q,
            mu_const=args.mu,
            theta=args.theta,
            nu0=args.nu0,
            max_iter=args.max_iter,
            tol_grad=args.tol_grad,
            tol_f=args.tol_f,
            trace=args.trace is not None,
        )
    except LpMeritError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    x_star = problem.known_optimum.x if problem.known_optimum is not None else None
    outcome = solve(problem.lp, config, x_star=x_star)

    report = {
        "status": outcome.status.value,
        "classification": (
            outcome.classification.value if outcome.classification is not None else None
        ),
        "final_f": outcome.final_f,
        "final_grad_norm": outcome.final_grad_norm,
        "iterations": outcome.iterations,
        "objective_primal": float(problem.lp.c @ outcome.point.x),
        "objective_dual": float(problem.lp.b @ outcome.point.lam),
        "point": {
            "x": outcome.point.x,
            "lambda": outcome.point.lam,
            "s": outcome.point.s,
        },
        "config": _config_document(config),
    }
    if args.homogeneous_escalate and outcome.status is SolveStatus.NO_OPTIMAL_SOLUTION:
        hom_point, hom_status = solve_homogeneous(
            problem.lp, config, HomogeneousPoint.ones(problem.lp.n, problem.lp.m)
        )
        report["homogeneous"] = {
            "status": hom_status.value,
            "tau": hom_point.tau,
            "kappa": hom_point.kappa,
        }
        print(f"homogeneous escalation: {hom_status.value}")
    try:
        if args.trace:
            _write_trace(args.trace, outcome.trace)
        if args.report:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(serialize.dumps(report))
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 3
    print(
        f"{outcome.status.value}: iterations={outcome.iterations} "
        f"f={outcome.final_f:.3e} grad_inf={outcome.final_grad_norm:.3e}"
        + (
            f" classification={outcome.classification.value}"
            if outcome.classification is not None
            else ""
        )
    )
    return _STATUS_EXIT[outcome.status]


def _solution_point(doc, n: int, m: int) -> PrimalDualPoint:
    for key in ("point", "known_optimum"):
        if isinstance(doc.get(key), dict):
            doc = doc[key]
            break
    x = np.asarray(doc["x"], dtype=float)
    lam = np.asarray(doc["lambda"], dtype=float)
    s = np.asarray(doc["s"], dtype=float)
    if x.shape != (n,) or lam.shape != (m,) or s.shape != (n,):
        raise ValueError(
            f"solution has sizes ({x.size}, {lam.size}, {s.size}), expected ({n}, {m}, {n})"
        )
    return PrimalDualPoint(x, lam, s)


def cmd_check(args) -> int:
    problem = _load_problem(args.input)
    if isinstance(problem, int):
        return problem
    try:
        with open(args.solution, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        point = _solution_point(doc, problem.lp.n, problem.lp.m)
    except OSError as exc:
        print(f"error: cannot read {args.solution}: {exc}", file=sys.stderr)
        return 3
    except (LpMeritError, ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid solution file {args.solution}: {exc}", file=sys.stderr)
        return 2
    gamma, rho, sigma = residuals(problem.lp, point)
    tol = CHECK_TOLERANCE * problem.lp.scale
    rows = [
        ("gap |c.x - b.lam|", abs(gamma), abs(gamma) <= tol),
        ("primal ||Ax - b||", float(np.linalg.norm(rho)), np.linalg.norm(rho) <= tol),
        ("dual ||A'lam + s - c||", float(np.linalg.norm(sigma)), np.linalg.norm(sigma) <= tol),
        ("min_x", float(point.x.min()), point.x.min() >= -tol),
        ("min_s", float(point.s.min()), point.s.min() >= -tol),
    ]
    for name, value, ok in rows:
        print(f"{name:24s} = {value: .6e}  [{'ok' if ok else 'FAIL'}]")
    print(f"tolerance = {tol:.6e} (1e-6 * scale)")
    return 0 if all(ok for _, _, ok in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpmerit",
        description="Linear programming by unconstrained minimization of a merit function.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random problem file")
    gen.add_argument("--m", type=int, required=True, help="number of constraints")
    gen.add_argument("--n", type=int, required=True, help="number of variables")
    gen.add_argument("--seed", type=int, default=0, help="PRNG seed (LPMERIT_SEED overrides)")
    gen.add_argument("--kind", choices=["optimal", "unbounded"], default="optimal")
    gen.add_argument("--out", required=True, help="output problem file (JSON)")
    gen.set_defaults(func=cmd_gen)

    slv = sub.add_parser("solve", help="solve a problem file")
    slv.add_argument("--input", required=True, help="problem file (JSON)")
    slv.add_argument(
        "--alg",
        choices=[a.value for a in Algorithm],
        default=Algorithm.HOMOTOPY.value,
        help="solver variant (default: homotopy)",
    )
    slv.add_argument("--q", type=float, default=None, help="hinge power (default per variant)")
    slv.add_argument("--theta", type=float, default=0.8, help="homotopy decay factor")
    slv.add_argument("--mu", type=float, default=1e-9, help="constant regularization")
    slv.add_argument("--nu0", type=float, default=1.0, help="initial homotopy weight")
    slv.add_argument("--max-iter", type=int, default=500)
    slv.add_argument("--tol-grad", type=float, default=1e-10)
    slv.add_argument("--tol-f", type=float, default=1e-16)
    slv.add_argument("--trace", default=None, help="write per-iteration trace CSV here")
    slv.add_argument("--report", default=None, help="write outcome report JSON here")
    slv.add_argument(
        "--homogeneous-escalate",
        action="store_true",
        help="on a certified no-optimum outcome, classify via the homogeneous embedding",
    )
    slv.set_defaults(func=cmd_solve)

    chk = sub.add_parser("check", help="check a solution against a problem")
    chk.add_argument("--input", required=True, help="problem file (JSON)")
    chk.add_argument("--solution", required=True, help="solution file (JSON)")
    chk.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
