"""Command-line interface.

Subcommands:
  solve           read a problem bundle, solve it, print solution + residuals
  backward-error  read a problem bundle and a candidate vector, print the report
  gen             generate an instance and write it as a problem bundle
  experiment      run an experiment grid and emit a table
  verify          run the property-verification suite

Exit codes: 0 success, 1 usage error, 2 numerical failure (singular or
ill-posed), 3 property-suite failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import backward_error as be
from . import harness
from .core import IlseError, WeightScheme
from .solver import check_well_posedness, normal_equation_residuals, solve_ilse
from .testgen import GenParams, gen_ilse_instance


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; remap to 1 so that 2 is
    # reserved for numerical failures.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _add_dim_flags(p, required=False):
    p.add_argument("--m", type=int, required=required, help="rows of A")
    p.add_argument("--n", type=int, required=required, help="columns of A")
    p.add_argument("--s", type=int, required=required, help="constraint rows")
    p.add_argument("--p", type=int, required=required, help="+1 entries of the signature matrix")
    p.add_argument("--q", type=int, required=required, help="-1 entries of the signature matrix")


def _add_weight_flags(p):
    p.add_argument("--theta1", type=float, default=None, help="weight on the b perturbation")
    p.add_argument("--theta2", type=float, default=None, help="weight on the B perturbation")
    p.add_argument("--theta3", type=float, default=None, help="weight on the d perturbation")


def _weights(args, fallback=None) -> WeightScheme:
    base = fallback if fallback is not None else WeightScheme()
    return WeightScheme(
        theta1=args.theta1 if args.theta1 is not None else base.theta1,
        theta2=args.theta2 if args.theta2 is not None else base.theta2,
        theta3=args.theta3 if args.theta3 is not None else base.theta3,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ilse", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem bundle")
    p_solve.add_argument("--problem", required=True, help="directory containing A, b, B, d, sig")

    p_be = sub.add_parser("backward-error", help="backward-error report for a candidate solution")
    p_be.add_argument("--problem", required=True, help="directory containing A, b, B, d, sig")
    p_be.add_argument("--y", required=True, help="candidate solution vector file")
    p_be.add_argument("--xi0", default=None, help="optional multiplier vector file")
    _add_weight_flags(p_be)

    p_gen = sub.add_parser("gen", help="generate an instance and write a problem bundle")
    _add_dim_flags(p_gen, required=True)
    p_gen.add_argument("--kappa-a", type=float, default=1e2)
    p_gen.add_argument("--kappa-b", type=float, default=1e2)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--hyper-bound", type=float, default=1.0)
    p_gen.add_argument("--out", required=True, help="output directory")

    p_exp = sub.add_parser("experiment", help="run an experiment grid")
    p_exp.add_argument("--config", default=None, help="JSON config file; flags override it")
    _add_dim_flags(p_exp)
    p_exp.add_argument("--kappa-a", type=float, action="append", default=None,
                       help="nominal condition of A (repeatable)")
    p_exp.add_argument("--kappa-b", type=float, action="append", default=None,
                       help="condition of B (repeatable)")
    p_exp.add_argument("--eps", type=float, action="append", default=None,
                       help="perturbation magnitude (repeatable)")
    p_exp.add_argument("--trials", type=int, default=None, help="trials per grid cell")
    p_exp.add_argument("--seed", type=int, default=None, help="base seed")
    p_exp.add_argument("--hyper-bound", type=float, default=None)
    p_exp.add_argument("--jobs", type=int, default=None, help="worker threads")
    p_exp.add_argument("--format", choices=("csv", "markdown", "json"), default=None)
    p_exp.add_argument("--out", default=None, help="write the table here instead of stdout")
    _add_weight_flags(p_exp)

    p_ver = sub.add_parser("verify", help="run the property-verification suite")
    p_ver.add_argument("--config", default=None, help="JSON config file for sizes/weights/seed")
    p_ver.add_argument("--seed", type=int, default=None, help="override the suite seed")

    return parser


def _cmd_solve(args) -> int:
    problem = harness.read_problem(args.problem)
    report = check_well_posedness(problem)
    sol = solve_ilse(problem)
    r1, r2 = normal_equation_residuals(problem, sol.x, sol.xi)
    payload = {
        "x": sol.x.tolist(),
        "xi": sol.xi.tolist(),
        "lambda": sol.lam.tolist(),
        "residual_norm": float(np.linalg.norm(sol.r)),
        "gamma": harness.residual_gamma(problem, sol),
        "normal_equation_residual_norms": [
            float(np.linalg.norm(r1)),
            float(np.linalg.norm(r2)),
        ],
        "min_projected_eig": report.min_projected_eig,
    }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_backward_error(args) -> int:
    problem = harness.read_problem(args.problem)
    y = harness.read_vector(args.y)
    xi0 = harness.read_vector(args.xi0) if args.xi0 else None
    report = be.backward_error_bounds(problem, y, _weights(args), xi0=xi0)
    payload = {
        "rho_xi1": report.rho_xi1,
        "rho_xi0": report.rho_xi0,
        "tau0": report.tau0,
        "alpha": report.alpha,
        "alpha_lower": report.alpha_lower,
        "small_rho_condition": report.small_rho_condition,
        "mu_upper": report.mu_upper,
        "mu_lower": report.mu_lower,
        "distance_lower": report.distance_lower,
        "bounds_applicable": report.bounds_applicable,
    }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_gen(args) -> int:
    params = GenParams(
        m=args.m, n=args.n, s=args.s, p=args.p, q=args.q,
        kappa_a=args.kappa_a, kappa_b=args.kappa_b,
        seed=args.seed, hyper_bound=args.hyper_bound,
    )
    problem, achieved = gen_ilse_instance(params)
    harness.write_problem(args.out, problem)
    print(f"wrote problem bundle to {args.out} (achieved kappa_A = {achieved:.5e})")
    return 0


def _cmd_experiment(args) -> int:
    data = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    config = harness.ExperimentConfig.from_dict(data) if data else harness.ExperimentConfig()

    overrides = {}
    for name, value in (
        ("m", args.m), ("n", args.n), ("s", args.s), ("p", args.p), ("q", args.q),
        ("trials_per_cell", args.trials), ("base_seed", args.seed),
        ("hyper_bound", args.hyper_bound), ("jobs", args.jobs),
        ("output_format", args.format),
    ):
        if value is not None:
            overrides[name] = value
    if args.kappa_a:
        overrides["kappa_a_list"] = tuple(args.kappa_a)
    if args.kappa_b:
        overrides["kappa_b_list"] = tuple(args.kappa_b)
    if args.eps:
        overrides["eps_list"] = tuple(args.eps)
    if args.theta1 is not None or args.theta2 is not None or args.theta3 is not None:
        overrides["weights"] = _weights(args, fallback=config.weights)
    if overrides:
        import dataclasses

        config = dataclasses.replace(config, **overrides)

    _, table = harness.run_experiment(config)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(table)
    else:
        sys.stdout.write(table)
    return 0


def _cmd_verify(args) -> int:
    config = None
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = harness.ExperimentConfig.from_dict(json.load(fh))
    if args.seed is not None:
        import dataclasses

        config = dataclasses.replace(config or harness.ExperimentConfig(
            m=24, n=12, s=5, p=14, q=10,
            kappa_a_list=(50.0,), kappa_b_list=(100.0,), eps_list=(1e-6,),
        ), base_seed=args.seed)
    report = harness.verify_suite(config)
    for line in report.lines():
        print(line)
    return 0 if report.ok else 3


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "solve": _cmd_solve,
        "backward-error": _cmd_backward_error,
        "gen": _cmd_gen,
        "experiment": _cmd_experiment,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"ilse: error: {exc}", file=sys.stderr)
        return 1
    except (IlseError, np.linalg.LinAlgError) as exc:
        print(f"ilse: numerical failure: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()
