"""Command-line entry points for running experiments and single solves.

Subcommands:

* ``run <config.json>``   -- execute a full experiment grid from a JSON config
* ``solve``               -- one ad-hoc solve controlled by flags
* ``spectra``             -- projected singular-spectrum comparison to CSV/SVG
* ``demo-tables``         -- built-in solver-comparison grids at desk scale

The output directory resolves in priority order: ``--output-dir`` flag,
``KRR_OUT`` environment variable, config value (or current directory).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys
from pathlib import Path

import numpy as np

from .analysis import projected_spectrum, semiconvergence_curve
from .experiment import (
    ExperimentConfig,
    build_problem,
    run_experiment,
    run_id,
    table1_config,
    table2_config,
    table3_config,
)
from .output import emit_pgm, write_convergence_svg, write_line_chart_svg
from .problems import add_noise
from .solvers import StoppingRule, gmres, qmr, rr_gmres, rr_qmr


def _resolve_out(flag_value, fallback=".") -> Path:
    if flag_value:
        return Path(flag_value)
    env = os.environ.get("KRR_OUT")
    if env:
        return Path(env)
    return Path(fallback)


def _cmd_run(args) -> int:
    with open(args.config) as fh:
        doc = json.load(fh)
    override = args.output_dir or os.environ.get("KRR_OUT")
    config = ExperimentConfig.from_dict(doc, output_dir=override)
    files = run_experiment(config)
    print(f"wrote {len(files)} files under {config.output_dir}")
    print(f"results: {files[0]}")
    return 0


def _cmd_solve(args) -> int:
    params = {"n": args.n}
    if args.band is not None:
        params["band"] = args.band
    if args.sigma is not None:
        params["sigma"] = args.sigma
    problem = build_problem(args.problem, params)
    noisy = add_noise(problem, args.noise, args.seed)
    assumed = args.assumed_noise if args.assumed_noise is not None else args.noise
    epsilon = (assumed / 100.0) * float(np.linalg.norm(problem.b_exact))
    rule = StoppingRule(epsilon=epsilon, eta=args.eta, max_iter=args.max_iter)

    solver_fns = {
        "gmres": lambda: gmres(problem.A, noisy.b, rule, x_true=problem.x_true),
        "qmr": lambda: qmr(problem.A, noisy.b, rule, x_true=problem.x_true),
        "rrgmres": lambda: rr_gmres(problem.A, noisy.b, args.shift, rule, x_true=problem.x_true),
        "rrqmr": lambda: rr_qmr(problem.A, noisy.b, args.shift, rule, x_true=problem.x_true),
    }
    if args.solver not in solver_fns:
        raise ValueError(f"unknown solver {args.solver!r}")
    result = solver_fns[args.solver]()

    min_iter, min_err, final_err = semiconvergence_curve(result)
    b_exact_norm = float(np.linalg.norm(problem.b_exact))
    print(f"problem            : {args.problem} (n={args.n})")
    print(f"solver             : {args.solver} (shift={args.shift})")
    print(f"noise / assumed    : {args.noise:g}% / {assumed:g}%")
    print(f"iterations         : {result.iterations} ({result.stop_reason.value})")
    print(f"final rel. error   : {final_err:.5e}")
    print(f"final rel. residual: {result.residual_history[-1] / b_exact_norm:.5e}")
    print(f"min rel. error     : {min_err:.5e} at iteration {min_iter}")

    out_dir = _resolve_out(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rid = run_id(args.solver, args.shift, args.noise, assumed, args.seed)
    svg = write_convergence_svg(
        out_dir / f"convergence_{rid}.svg",
        rid,
        result.residual_history / b_exact_norm,
        result.error_history,
    )
    print(f"wrote {svg}")
    if problem.image_dims is not None:
        pgm = emit_pgm(result.solution, problem.image_dims, out_dir / f"recon_{rid}.pgm")
        print(f"wrote {pgm}")
    return 0


def _cmd_spectra(args) -> int:
    problem = build_problem(args.problem, {"n": args.n})
    noisy = add_noise(problem, args.noise, args.seed)
    out_dir = _resolve_out(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    reports = []
    for kind in ("gmres", "qmr"):
        for ell in args.shifts:
            reports.append(projected_spectrum(kind, problem.A, noisy.b, args.m, ell=ell))

    csv_path = out_dir / "spectra.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "shift", "index", "singular_value"])
        for rep in reports:
            for i, s in enumerate(rep.singular_values, start=1):
                writer.writerow([rep.method, rep.ell, i, f"{s:.5e}"])
    series = [
        (f"{rep.method} shift={rep.ell}", rep.singular_values) for rep in reports
    ]
    svg_path = write_line_chart_svg(
        out_dir / "spectra.svg",
        f"projected singular values ({args.problem} n={args.n}, m={args.m})",
        series,
        x_label="index",
    )
    print(f"wrote {csv_path}")
    print(f"wrote {svg_path}")
    return 0


def _median_table(csv_path: Path) -> str:
    """Render median final errors as a (solver, shift) x noise text table."""
    rows = list(csv.DictReader(open(csv_path)))
    noises = sorted({float(r["noise_percent"]) for r in rows})
    keys = []
    for r in rows:
        key = (r["solver"], int(r["shift"]))
        if key not in keys:
            keys.append(key)
    lines = ["solver          " + "".join(f"{v:>12g}%" for v in noises)]
    for solver, shift in keys:
        cells = []
        for v in noises:
            errs = [
                float(r["final_rel_error"])
                for r in rows
                if r["solver"] == solver
                and int(r["shift"]) == shift
                and float(r["noise_percent"]) == v
            ]
            cells.append(f"{statistics.median(errs):>13.3e}" if errs else f"{'-':>13}")
        lines.append(f"{solver + f'({shift})':<16}" + "".join(cells))
    return "\n".join(lines)


def _cmd_demo_tables(args) -> int:
    out_root = _resolve_out(args.output_dir, fallback="krr-tables")
    builders = {1: table1_config, 2: table2_config, 3: table3_config}
    for idx in args.tables:
        if idx not in builders:
            raise ValueError(f"unknown table {idx}; choose from 1, 2, 3")
        config = builders[idx](out_root / f"table{idx}")
        files = run_experiment(config)
        print(f"table {idx}: median final relative errors ({config.problem_name})")
        print(_median_table(files[0]))
        print(f"  -> {files[0]}")
        print()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krr",
        description="Krylov solvers with range restriction for ill-posed problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment grid from a JSON config")
    p_run.add_argument("config", help="path to the JSON experiment config")
    p_run.add_argument("--output-dir", help="override the config's output directory")
    p_run.set_defaults(func=_cmd_run)

    p_solve = sub.add_parser("solve", help="run a single solve")
    p_solve.add_argument("--problem", required=True, choices=["phillips", "shaw", "blur2d"])
    p_solve.add_argument("--n", type=int, default=512, help="problem size (image side for blur2d)")
    p_solve.add_argument(
        "--solver", required=True, choices=["gmres", "qmr", "rrgmres", "rrqmr"]
    )
    p_solve.add_argument("--shift", type=int, default=0, help="range-restriction shift count")
    p_solve.add_argument("--noise", type=float, default=1.0, help="noise level in percent")
    p_solve.add_argument("--seed", type=int, default=1)
    p_solve.add_argument("--eta", type=float, default=1.01, help="discrepancy safety factor")
    p_solve.add_argument("--max-iter", type=int, default=100)
    p_solve.add_argument(
        "--assumed-noise",
        type=float,
        default=None,
        help="assumed noise percent for the stopping rule (defaults to --noise)",
    )
    p_solve.add_argument("--band", type=int, default=None, help="blur2d bandwidth")
    p_solve.add_argument("--sigma", type=float, default=None, help="blur2d PSF width")
    p_solve.add_argument("--output-dir")
    p_solve.set_defaults(func=_cmd_solve)

    p_spec = sub.add_parser("spectra", help="projected singular-spectrum comparison")
    p_spec.add_argument("--problem", default="phillips", choices=["phillips", "shaw", "blur2d"])
    p_spec.add_argument("--n", type=int, default=200)
    p_spec.add_argument("--m", type=int, default=30, help="projected system size")
    p_spec.add_argument("--noise", type=float, default=1.0)
    p_spec.add_argument("--seed", type=int, default=1)
    p_spec.add_argument("--shifts", type=int, nargs="+", default=[0, 1, 2])
    p_spec.add_argument("--output-dir")
    p_spec.set_defaults(func=_cmd_spectra)

    p_demo = sub.add_parser("demo-tables", help="run the built-in comparison grids")
    p_demo.add_argument("--tables", type=int, nargs="+", default=[1, 2, 3])
    p_demo.add_argument("--output-dir")
    p_demo.set_defaults(func=_cmd_demo_tables)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
