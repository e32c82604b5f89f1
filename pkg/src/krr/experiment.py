"""Config-driven experiment grids: solver x shift x noise x seed sweeps to files.

A single JSON document describes one problem and a grid of solver runs; the
runner writes one CSV row per grid point plus a convergence chart per run
(and reconstructed images for the 2-D problem).  Everything is deterministic
given the config, so repeated runs produce byte-identical outputs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import semiconvergence_curve
from .linalg import jacobi_svd
from .output import emit_pgm, write_convergence_svg
from .problems import NoisyData, ProblemInstance, add_noise, blur2d, phillips, shaw
from .solvers import (
    SolveResult,
    StopReason,
    StoppingRule,
    discrepancy_stop,
    gmres,
    qmr,
    rr_gmres,
    rr_qmr,
)

PROBLEM_NAMES = ("phillips", "shaw", "blur2d")
SOLVER_NAMES = ("gmres", "qmr", "rrgmres", "rrqmr", "tsvd")

CSV_HEADER = (
    "problem",
    "solver",
    "shift",
    "noise_percent",
    "assumed_noise_percent",
    "seed",
    "iterations",
    "stop_reason",
    "final_rel_error",
    "final_rel_residual",
    "min_error_iter",
    "min_error",
)


@dataclass(frozen=True)
class SolverChoice:
    name: str
    shifts: tuple[int, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    problem_name: str
    problem_params: dict
    solvers: tuple[SolverChoice, ...]
    noise_levels_percent: tuple[float, ...]
    seeds: tuple[int, ...]
    assumed_noise_levels_percent: tuple[float, ...] | None = None
    eta: float = 1.01
    max_iter: int = 100
    output_dir: Path = field(default_factory=lambda: Path("."))

    def __post_init__(self):
        if self.problem_name not in PROBLEM_NAMES:
            raise ValueError(f"unknown problem {self.problem_name!r}")
        if not self.solvers:
            raise ValueError("solver list must not be empty")
        for choice in self.solvers:
            if choice.name not in SOLVER_NAMES:
                raise ValueError(f"unknown solver {choice.name!r}")
            if any(s < 0 for s in choice.shifts):
                raise ValueError(f"negative shift for solver {choice.name!r}")
        if not self.noise_levels_percent:
            raise ValueError("noise level list must not be empty")
        if not self.seeds:
            raise ValueError("seed list must not be empty")
        if self.assumed_noise_levels_percent is not None and len(
            self.assumed_noise_levels_percent
        ) != len(self.noise_levels_percent):
            raise ValueError("assumed noise levels must pair one-to-one with actual levels")
        if self.eta <= 1.0:
            raise ValueError("eta must be greater than 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")

    @classmethod
    def from_dict(cls, doc: dict, output_dir=None) -> "ExperimentConfig":
        """Build a config from a parsed JSON document."""
        if not isinstance(doc, dict):
            raise ValueError("config must be a JSON object")
        problem = doc.get("problem")
        if not isinstance(problem, dict) or "name" not in problem:
            raise ValueError('config needs a "problem" object with a "name"')
        params = {k: v for k, v in problem.items() if k != "name"}
        solvers = []
        for entry in doc.get("solvers", []):
            if isinstance(entry, str):
                name, shifts = entry, None
            elif isinstance(entry, dict) and "name" in entry:
                name, shifts = entry["name"], entry.get("shifts")
            else:
                raise ValueError(f"bad solver entry {entry!r}")
            if shifts is None:
                shifts = (1,) if name in ("rrgmres", "rrqmr") else (0,)
            solvers.append(SolverChoice(name=name, shifts=tuple(int(s) for s in shifts)))
        assumed = doc.get("assumed_noise_levels_percent")
        out = output_dir if output_dir is not None else doc.get("output_dir", ".")
        return cls(
            problem_name=problem["name"],
            problem_params=params,
            solvers=tuple(solvers),
            noise_levels_percent=tuple(float(v) for v in doc.get("noise_levels_percent", [])),
            seeds=tuple(int(s) for s in doc.get("seeds", [])),
            assumed_noise_levels_percent=(
                tuple(float(v) for v in assumed) if assumed is not None else None
            ),
            eta=float(doc.get("eta", 1.01)),
            max_iter=int(doc.get("max_iter", 100)),
            output_dir=Path(out),
        )

    def noise_pairs(self) -> list[tuple[float, float]]:
        """(actual, assumed) noise level pairs; assumed defaults to actual."""
        if self.assumed_noise_levels_percent is None:
            return [(v, v) for v in self.noise_levels_percent]
        return list(zip(self.noise_levels_percent, self.assumed_noise_levels_percent))


@dataclass(frozen=True)
class ExperimentRecord:
    problem: str
    solver: str
    shift: int
    noise_percent: float
    assumed_noise_percent: float
    seed: int
    iterations: int
    stop_reason: str
    final_rel_error: float
    final_rel_residual: float
    min_error_iter: int
    min_error: float


def build_problem(name: str, params: dict) -> ProblemInstance:
    if name == "phillips":
        return phillips(int(params.get("n", 512)))
    if name == "shaw":
        return shaw(int(params.get("n", 200)))
    if name == "blur2d":
        return blur2d(
            int(params.get("n", 32)),
            band=int(params.get("band", 9)),
            sigma=float(params.get("sigma", 2.0)),
        )
    raise ValueError(f"unknown problem {name!r}")


def _tsvd_sweep(
    problem: ProblemInstance, svd, noisy: NoisyData, rule: StoppingRule
) -> SolveResult:
    """Sweep the truncation index like an iteration count, with the same stopping."""
    sigma = svd.singular_values
    positive = int(np.sum(sigma > 0.0))
    k_max = min(rule.max_iter, positive)
    coeffs = svd.U.T @ noisy.b
    x_true_norm = float(np.linalg.norm(problem.x_true))
    x = np.zeros_like(problem.x_true)
    iterates, residuals, errors = [], [], []
    stop_reason = StopReason.MAX_ITERATIONS
    for k in range(k_max):
        x = x + (coeffs[k] / sigma[k]) * svd.V[:, k]
        rn = float(np.linalg.norm(noisy.b - problem.A.apply(x)))
        iterates.append(x)
        residuals.append(rn)
        errors.append(float(np.linalg.norm(problem.x_true - x)) / x_true_norm)
        if discrepancy_stop(rn, rule):
            stop_reason = StopReason.DISCREPANCY
            break
    return SolveResult(
        solution=iterates[-1],
        iterations=len(iterates),
        residual_history=np.array(residuals),
        error_history=np.array(errors),
        stop_reason=stop_reason,
        iterates=iterates,
    )


def _dispatch_solve(
    solver: str,
    ell: int,
    problem: ProblemInstance,
    noisy: NoisyData,
    rule: StoppingRule,
    svd_cache: dict,
) -> SolveResult:
    if solver == "gmres":
        return gmres(problem.A, noisy.b, rule, x_true=problem.x_true)
    if solver == "qmr":
        return qmr(problem.A, noisy.b, rule, x_true=problem.x_true)
    if solver == "rrgmres":
        return rr_gmres(problem.A, noisy.b, ell, rule, x_true=problem.x_true)
    if solver == "rrqmr":
        return rr_qmr(problem.A, noisy.b, ell, rule, x_true=problem.x_true)
    if solver == "tsvd":
        if "svd" not in svd_cache:
            svd_cache["svd"] = jacobi_svd(problem.A.to_dense())
        return _tsvd_sweep(problem, svd_cache["svd"], noisy, rule)
    raise ValueError(f"unknown solver {solver!r}")


def run_id(solver: str, ell: int, noise: float, assumed: float, seed: int) -> str:
    return f"{solver}_l{ell}_v{noise:g}_a{assumed:g}_s{seed}"


def _fmt(x: float) -> str:
    return f"{x:.5e}"


def run_experiment(config: ExperimentConfig) -> list[Path]:
    """Execute the full grid and write results.csv plus per-run artifacts.

    Returns the list of written files (CSV first).  Row order follows the
    grid order in the config, so identical configs give identical bytes.
    """
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    problem = build_problem(config.problem_name, config.problem_params)
    b_exact_norm = float(np.linalg.norm(problem.b_exact))
    svd_cache: dict = {}
    records: list[ExperimentRecord] = []
    extra_files: list[Path] = []

    for choice in config.solvers:
        for ell in choice.shifts:
            for noise, assumed in config.noise_pairs():
                for seed in config.seeds:
                    noisy = add_noise(problem, noise, seed)
                    epsilon = (assumed / 100.0) * b_exact_norm
                    rule = StoppingRule(
                        epsilon=epsilon, eta=config.eta, max_iter=config.max_iter
                    )
                    result = _dispatch_solve(
                        choice.name, ell, problem, noisy, rule, svd_cache
                    )
                    min_iter, min_err, final_err = semiconvergence_curve(result)
                    records.append(
                        ExperimentRecord(
                            problem=config.problem_name,
                            solver=choice.name,
                            shift=ell,
                            noise_percent=noise,
                            assumed_noise_percent=assumed,
                            seed=seed,
                            iterations=result.iterations,
                            stop_reason=result.stop_reason.value,
                            final_rel_error=final_err,
                            final_rel_residual=float(result.residual_history[-1])
                            / b_exact_norm,
                            min_error_iter=min_iter,
                            min_error=min_err,
                        )
                    )
                    rid = run_id(choice.name, ell, noise, assumed, seed)
                    extra_files.append(
                        write_convergence_svg(
                            out_dir / f"convergence_{rid}.svg",
                            rid,
                            result.residual_history / b_exact_norm,
                            result.error_history,
                        )
                    )
                    if problem.image_dims is not None:
                        extra_files.append(
                            emit_pgm(
                                result.solution,
                                problem.image_dims,
                                out_dir / f"recon_{rid}.pgm",
                            )
                        )

    csv_path = out_dir / "results.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.problem,
                    r.solver,
                    r.shift,
                    _fmt(r.noise_percent),
                    _fmt(r.assumed_noise_percent),
                    r.seed,
                    r.iterations,
                    r.stop_reason,
                    _fmt(r.final_rel_error),
                    _fmt(r.final_rel_residual),
                    r.min_error_iter,
                    _fmt(r.min_error),
                ]
            )
    return [csv_path, *extra_files]


def table1_config(output_dir) -> ExperimentConfig:
    """Solver comparison grid: all four methods on the 1-D Phillips problem."""
    return ExperimentConfig(
        problem_name="phillips",
        problem_params={"n": 512},
        solvers=(
            SolverChoice("gmres", (0,)),
            SolverChoice("qmr", (0,)),
            SolverChoice("rrgmres", (1, 2)),
            SolverChoice("rrqmr", (1, 2)),
        ),
        noise_levels_percent=(0.1, 0.5, 1.0),
        seeds=(1, 2, 3, 4, 5),
        output_dir=Path(output_dir),
    )


def table2_config(output_dir) -> ExperimentConfig:
    """Shift sweep for the quasi-minimal solver, including the unshifted case."""
    return ExperimentConfig(
        problem_name="phillips",
        problem_params={"n": 512},
        solvers=(SolverChoice("rrqmr", (0, 1, 2, 3)),),
        noise_levels_percent=(0.5, 1.0, 5.0),
        seeds=(1, 2, 3, 4, 5),
        output_dir=Path(output_dir),
    )


def table3_config(output_dir) -> ExperimentConfig:
    """Image deblurring comparison on the 2-D Gaussian blur problem."""
    return ExperimentConfig(
        problem_name="blur2d",
        problem_params={"n": 32},
        solvers=(
            SolverChoice("gmres", (0,)),
            SolverChoice("qmr", (0,)),
            SolverChoice("rrgmres", (1,)),
            SolverChoice("rrqmr", (1,)),
        ),
        noise_levels_percent=(0.5, 1.0, 5.0),
        seeds=(1, 2, 3, 4, 5),
        output_dir=Path(output_dir),
    )
