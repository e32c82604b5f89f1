"""Iterative solvers for ill-posed square systems, with optional range restriction.

The four Krylov solvers share one engine: grow an Arnoldi or bi-Lanczos
decomposition, project the residual minimization onto a small
``(m+1) x m`` Hessenberg/tridiagonal least-squares problem, and map the
coefficients back through the basis.  A shift count ``ell >= 1`` restricts
the search space from the usual Krylov space of ``b`` to that of
``A^ell b``, which is implemented through a chain of successive QR
factorizations of the projected matrix rather than by forming the shifted
basis explicitly.  ``ell = 0`` reproduces the plain solvers exactly.

All solvers stop on the discrepancy principle evaluated with the explicit
residual ``||b - A x_m||`` (recomputed each iteration), so the stopping
rule means the same thing for the quasi-minimal solvers as for GMRES.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .krylov import ArnoldiProcess, BiLanczosProcess
from .linalg import LinearOperator, SVDResult, _as_vector, householder_qr, solve_upper_triangular


class StopReason(enum.Enum):
    DISCREPANCY = "discrepancy"
    MAX_ITERATIONS = "max_iterations"
    BREAKDOWN = "breakdown"


@dataclass(frozen=True)
class StoppingRule:
    """Discrepancy-principle stopping: accept once ||b - A x|| <= eta * epsilon.

    ``epsilon`` is the assumed bound on the noise norm ``||e||`` and ``eta``
    a safety factor slightly above one.
    """

    epsilon: float
    eta: float = 1.01
    max_iter: int = 100

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.eta <= 1.0:
            raise ValueError("eta must be greater than 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


def discrepancy_stop(residual_norm: float, rule: StoppingRule) -> bool:
    if residual_norm < 0:
        raise ValueError("residual norm must be non-negative")
    return residual_norm <= rule.eta * rule.epsilon


@dataclass(frozen=True)
class QRChain:
    """Successive QR factors Q^(1)..Q^(ell+1), R^(1)..R^(ell+1).

    The first pair factors the leading ``(m+1) x m`` block of the projected
    matrix P; each later pair factors ``P-block @ Q-block`` of the previous
    step, one extra row and column at a time.  The last R carries the
    reduced triangular least-squares problem; the second-to-last Q maps
    solution coefficients back onto the basis.
    """

    ell: int
    q_factors: list[np.ndarray]
    r_factors: list[np.ndarray]


def _qr_chain(P: np.ndarray, ell: int, m: int) -> QRChain:
    # Block sizes clamp to the available rows/cols so the same recursion
    # covers both the rectangular case and the square one after breakdown.
    rows, cols = P.shape
    r0 = min(m + 1, rows)
    Q, R = householder_qr(P[:r0, :m])
    qs, rs = [Q], [R]
    for j in range(1, ell + 1):
        br = min(j + m + 1, rows)
        bc = min(j + m, cols)
        block = P[:br, :bc] @ qs[-1][:bc, :m]
        Q, R = householder_qr(block)
        qs.append(Q)
        rs.append(R)
    return QRChain(ell=ell, q_factors=qs, r_factors=rs)


def build_qr_chain(P, ell: int, m: int) -> QRChain:
    """Build the shift chain for a projected Hessenberg/tridiagonal matrix."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 2:
        raise ValueError("projected matrix must be 2-dimensional")
    if ell < 0:
        raise ValueError("shift count must be non-negative")
    if m < 1:
        raise ValueError("need at least one column")
    if P.shape[0] < m + 1 or P.shape[1] < m:
        raise ValueError(
            f"projected matrix {P.shape} too small for m={m} (need >= {m+1} rows, {m} cols)"
        )
    return _qr_chain(P, ell, m)


def _reduced_lstsq(Q: np.ndarray, R: np.ndarray, beta: float) -> tuple[np.ndarray, float]:
    """Solve min_y ||R y - beta * Q^T e1|| for upper trapezoidal R.

    Returns the minimizer and the norm of the discarded tail, which is the
    projected residual of the least-squares problem.
    """
    ncols = R.shape[1]
    c = beta * Q[0, :]
    y = solve_upper_triangular(R[:ncols, :ncols], c[:ncols])
    return y, float(np.linalg.norm(c[ncols:]))


@dataclass(frozen=True)
class SolveResult:
    """Outcome of an iterative solve.

    ``residual_history`` holds the explicit residual norm ``||b - A x_m||``
    of every iterate; ``error_history`` the relative error against the true
    solution when one was supplied.  ``iterates`` keeps every x_m so
    semiconvergence can be examined after the fact.
    """

    solution: np.ndarray
    iterations: int
    residual_history: np.ndarray
    error_history: np.ndarray | None
    stop_reason: StopReason
    iterates: list[np.ndarray] = field(repr=False, default_factory=list)


def _solution_coords(chain: QRChain, beta: float) -> tuple[np.ndarray, float]:
    return _reduced_lstsq(chain.q_factors[-1], chain.r_factors[-1], beta)


def _krylov_solve(
    A: LinearOperator,
    b: np.ndarray,
    ell: int,
    stop: StoppingRule,
    x_true: np.ndarray | None,
    process_cls,
) -> SolveResult:
    if ell < 0:
        raise ValueError("shift count must be non-negative")
    b = _as_vector(b, "b")
    proc = process_cls(A, b)
    beta = proc.beta
    n = A.n_cols
    x_true_norm = float(np.linalg.norm(x_true)) if x_true is not None else 0.0

    iterates: list[np.ndarray] = []
    residuals: list[float] = []
    errors: list[float] = []

    def record(x: np.ndarray) -> float:
        rn = float(np.linalg.norm(b - A.apply(x)))
        iterates.append(x)
        residuals.append(rn)
        if x_true is not None:
            errors.append(float(np.linalg.norm(x_true - x)) / x_true_norm)
        return rn

    stop_reason = None
    m = 0
    while True:
        target = ell + m + 1
        while proc.steps < target and not proc.breakdown:
            proc.step()
        if proc.breakdown:
            # The space is exhausted: form one final iterate over the full
            # square projected system (exact in exact arithmetic), then stop.
            k = proc.steps
            stop_reason = StopReason.BREAKDOWN
            try:
                chain = _qr_chain(proc.projected(), ell, k)
                y, _ = _solution_coords(chain, beta)
                V = proc.basis()
                x = V @ (chain.q_factors[ell - 1] @ y) if ell >= 1 else V @ y
                rn = record(x)
                if discrepancy_stop(rn, stop):
                    stop_reason = StopReason.DISCREPANCY
            except np.linalg.LinAlgError:
                pass
            break
        m += 1
        try:
            chain = _qr_chain(proc.projected(), ell, m)
            y, _ = _solution_coords(chain, beta)
        except np.linalg.LinAlgError:
            # Projected system became numerically singular; iterating
            # further would only amplify roundoff.
            stop_reason = StopReason.BREAKDOWN
            break
        V = proc.basis()
        if ell >= 1:
            x = V[:, : ell + m] @ (chain.q_factors[ell - 1][: ell + m, :m] @ y)
        else:
            x = V[:, :m] @ y
        rn = record(x)
        if discrepancy_stop(rn, stop):
            stop_reason = StopReason.DISCREPANCY
            break
        if m >= stop.max_iter:
            stop_reason = StopReason.MAX_ITERATIONS
            break

    if iterates:
        solution = iterates[-1]
        if stop_reason is StopReason.BREAKDOWN and process_cls is BiLanczosProcess:
            # Quasi-minimization gives no optimality guarantee at breakdown;
            # fall back to the iterate with the smallest true residual.
            solution = iterates[int(np.argmin(residuals))]
    else:
        solution = np.zeros(n)
    return SolveResult(
        solution=solution,
        iterations=len(iterates),
        residual_history=np.array(residuals),
        error_history=np.array(errors) if x_true is not None else None,
        stop_reason=stop_reason,
        iterates=iterates,
    )


def gmres(
    A: LinearOperator,
    b: np.ndarray,
    stop: StoppingRule,
    x_true: np.ndarray | None = None,
) -> SolveResult:
    """GMRES with x0 = 0: minimize ||b - A x|| over the Krylov space of b.

    Each iteration solves the projected problem ``min ||beta e1 - H_m y||``
    by QR factorization and back-substitution and maps back via the
    orthonormal Arnoldi basis.
    """
    return _krylov_solve(A, b, 0, stop, x_true, ArnoldiProcess)


def rr_gmres(
    A: LinearOperator,
    b: np.ndarray,
    ell: int,
    stop: StoppingRule,
    x_true: np.ndarray | None = None,
) -> SolveResult:
    """Range-restricted GMRES: iterates confined to the Krylov space of A^ell b.

    Runs ``ell`` extra Arnoldi steps ahead of the iteration count and
    solves the reduced triangular problem produced by the successive QR
    chain of the Hessenberg matrix.  ``ell = 0`` is plain GMRES.
    """
    return _krylov_solve(A, b, ell, stop, x_true, ArnoldiProcess)


def qmr(
    A: LinearOperator,
    b: np.ndarray,
    stop: StoppingRule,
    x_true: np.ndarray | None = None,
) -> SolveResult:
    """Quasi-minimal residual method built on Lanczos bi-orthogonalization.

    Minimizes the projected quantity ``||beta e1 - T_m y||`` as if the
    bi-orthogonal basis were orthonormal.  Stopping decisions use the
    explicit residual, not the quasi-residual, so the discrepancy principle
    is applied honestly.  Requires transpose products with A.
    """
    return _krylov_solve(A, b, 0, stop, x_true, BiLanczosProcess)


def rr_qmr(
    A: LinearOperator,
    b: np.ndarray,
    ell: int,
    stop: StoppingRule,
    x_true: np.ndarray | None = None,
) -> SolveResult:
    """Range-restricted QMR: the shift chain applied to the tridiagonal T.

    Identical chain structure to range-restricted GMRES with T in place of
    the Hessenberg matrix; ``ell = 0`` is plain QMR.
    """
    return _krylov_solve(A, b, ell, stop, x_true, BiLanczosProcess)


def tsvd(A_svd: SVDResult, b, m: int) -> np.ndarray:
    """Truncated-SVD solution: keep only the m largest singular triplets."""
    b = _as_vector(b, "b")
    sigma = A_svd.singular_values
    positive = int(np.sum(sigma > 0.0))
    if not 1 <= m <= positive:
        raise ValueError(f"truncation index must be in [1, {positive}], got {m}")
    coefficients = (A_svd.U[:, :m].T @ b) / sigma[:m]
    return A_svd.V[:, :m] @ coefficients
