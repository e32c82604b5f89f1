"""Reconstruction metrics and spectral diagnostics for the projected systems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .krylov import ArnoldiProcess, BiLanczosProcess
from .linalg import LinearOperator, _as_vector, jacobi_svd
from .solvers import SolveResult, _qr_chain

_ARNOLDI_KINDS = {"gmres", "rrgmres"}
_LANCZOS_KINDS = {"qmr", "rrqmr"}


def relative_error(x, x_true) -> float:
    """||x_true - x|| / ||x_true||."""
    x = _as_vector(x, "x")
    x_true = _as_vector(x_true, "x_true")
    if x.shape != x_true.shape:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {x_true.shape[0]}")
    denom = float(np.linalg.norm(x_true))
    if denom == 0.0:
        raise ValueError("x_true must be nonzero")
    return float(np.linalg.norm(x_true - x)) / denom


def relative_residual(A: LinearOperator, x, b, b_exact) -> float:
    """||b - A x|| / ||b_exact||, the data-fit measure used in the experiments."""
    x = _as_vector(x, "x")
    b = _as_vector(b, "b")
    b_exact = _as_vector(b_exact, "b_exact")
    denom = float(np.linalg.norm(b_exact))
    if denom == 0.0:
        raise ValueError("b_exact must be nonzero")
    return float(np.linalg.norm(b - A.apply(x))) / denom


@dataclass(frozen=True)
class SpectrumReport:
    """Singular values of the projected matrix a solver minimizes over."""

    method: str
    ell: int
    steps: int
    singular_values: np.ndarray
    truncated: bool = False


def projected_spectrum(
    solver_kind: str, A: LinearOperator, b, m: int, ell: int = 0
) -> SpectrumReport:
    """Singular spectrum of the projected system after m iterations.

    For the unshifted solvers this is the spectrum of the rectangular
    Hessenberg (GMRES) or tridiagonal (QMR) matrix itself; for shifted
    variants it is the top m x m block of the final R factor of the QR
    chain.  The basis is grown ``ell`` steps ahead so the reported block is
    m x m for every shift, making decay curves comparable across shifts.
    If the process breaks down early the report covers the achieved step
    count and is flagged ``truncated``.
    """
    kind = solver_kind.lower()
    if kind in _ARNOLDI_KINDS:
        process_cls = ArnoldiProcess
    elif kind in _LANCZOS_KINDS:
        process_cls = BiLanczosProcess
    else:
        raise ValueError(f"unknown solver kind {solver_kind!r}")
    if m < 1:
        raise ValueError("need at least one step")
    if ell < 0:
        raise ValueError("shift count must be non-negative")
    b = _as_vector(b, "b")
    proc = process_cls(A, b)
    target = ell + m
    while proc.steps < target and not proc.breakdown:
        proc.step()
    truncated = proc.steps < target
    m_eff = max(proc.steps - ell, 1) if truncated else m
    P = proc.projected()
    if ell == 0:
        sigma = jacobi_svd(P).singular_values
    else:
        chain = _qr_chain(P, ell, m_eff)
        R = chain.r_factors[-1]
        sigma = jacobi_svd(R[:m_eff, :m_eff]).singular_values
    return SpectrumReport(
        method=kind, ell=ell, steps=m_eff, singular_values=sigma, truncated=truncated
    )


def semiconvergence_curve(result: SolveResult) -> tuple[int, float, float]:
    """Locate the error minimum of a solve: (1-based argmin, min error, final error)."""
    if result.error_history is None or len(result.error_history) == 0:
        raise ValueError("solve result carries no error history")
    errs = result.error_history
    idx = int(np.argmin(errs))
    return idx + 1, float(errs[idx]), float(errs[-1])
