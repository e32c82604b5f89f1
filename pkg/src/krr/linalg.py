"""Dense linear algebra kernels and the matrix-free operator abstraction.

Everything here works on plain float64 numpy arrays.  The factorizations are
deliberately self-contained (Householder QR, one-sided Jacobi SVD) so that
their conventions are fixed: QR always produces a non-negative R diagonal,
and the Jacobi SVD retains high relative accuracy on tiny singular values,
which the spectral diagnostics elsewhere in the package depend on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


def _as_matrix(M, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={M.ndim}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def _as_vector(v, name: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got ndim={v.ndim}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def householder_qr(M) -> tuple[np.ndarray, np.ndarray]:
    """Factor M (rows >= cols) as Q @ R with Q square orthogonal.

    R is returned with the same shape as M, zero below the diagonal, and
    with a non-negative diagonal; the sign convention makes the
    factorization of a given matrix unique and therefore deterministic.
    """
    M = _as_matrix(M)
    rows, cols = M.shape
    if rows < cols:
        raise ValueError(f"need rows >= cols, got {rows}x{cols}")

    R = M.copy()
    Q = np.eye(rows)
    for k in range(cols):
        x = R[k:, k]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            continue
        v = x.copy()
        # v = x + sign(x[0]) * ||x|| * e1 avoids cancellation
        v[0] += norm_x if x[0] >= 0 else -norm_x
        v /= np.linalg.norm(v)
        R[k:, k:] -= 2.0 * np.outer(v, v @ R[k:, k:])
        Q[:, k:] -= 2.0 * np.outer(Q[:, k:] @ v, v)

    for i in range(cols):
        if R[i, i] < 0.0:
            R[i, :] = -R[i, :]
            Q[:, i] = -Q[:, i]
    # make the trapezoidal structure exact
    for j in range(cols):
        R[j + 1 :, j] = 0.0
    return Q, R


def solve_upper_triangular(R, c) -> np.ndarray:
    """Back-substitution for a square upper triangular system R @ y = c."""
    R = _as_matrix(R, "R")
    c = _as_vector(c, "c")
    m = R.shape[0]
    if R.shape[1] != m:
        raise ValueError(f"R must be square, got {R.shape}")
    if c.shape[0] != m:
        raise ValueError(f"right-hand side length {c.shape[0]} != {m}")
    scale = np.max(np.abs(R)) if m else 0.0
    diag = np.abs(np.diag(R))
    if m and np.any(diag <= 1e-14 * scale):
        raise np.linalg.LinAlgError(
            f"triangular system is numerically singular "
            f"(min |R_ii| = {diag.min():.3e}, max |R| = {scale:.3e})"
        )
    y = np.zeros(m)
    for i in range(m - 1, -1, -1):
        y[i] = (c[i] - R[i, i + 1 :] @ y[i + 1 :]) / R[i, i]
    return y


@dataclass(frozen=True)
class SVDResult:
    """Thin SVD: U @ diag(singular_values) @ V.T reconstructs the input."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray


def _complete_orthonormal(U: np.ndarray, col: int) -> None:
    """Overwrite column `col` of U with a unit vector orthogonal to the rest."""
    rows = U.shape[0]
    for k in range(rows):
        cand = np.zeros(rows)
        cand[k] = 1.0
        for _ in range(2):
            for j in range(U.shape[1]):
                if j == col:
                    continue
                cand -= (U[:, j] @ cand) * U[:, j]
        norm = np.linalg.norm(cand)
        if norm > 0.5:
            U[:, col] = cand / norm
            return
    raise np.linalg.LinAlgError("could not complete orthonormal basis")


def jacobi_svd(M, max_sweeps: int = 50) -> SVDResult:
    """One-sided Jacobi SVD of a dense matrix.

    Columns of the working matrix are rotated pairwise until all are
    mutually orthogonal relative to their sizes (threshold 1e-14), which
    preserves the relative accuracy of even the smallest singular values.
    Intended for small matrices (projected systems, desk-scale operators);
    raises ``numpy.linalg.LinAlgError`` if `max_sweeps` sweeps do not
    converge.
    """
    M = _as_matrix(M)
    rows, cols = M.shape
    if min(rows, cols) < 1:
        raise ValueError("matrix must have at least one row and column")
    if rows < cols:
        flipped = jacobi_svd(M.T, max_sweeps=max_sweeps)
        return SVDResult(U=flipped.V, singular_values=flipped.singular_values, V=flipped.U)

    G = M.copy()
    V = np.eye(cols)
    tol = 1e-14
    for _ in range(max_sweeps):
        rotated = False
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                app = G[:, p] @ G[:, p]
                aqq = G[:, q] @ G[:, q]
                apq = G[:, p] @ G[:, q]
                if abs(apq) <= tol * np.sqrt(app * aqq):
                    continue
                rotated = True
                zeta = (aqq - app) / (2.0 * apq)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                if zeta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                gp = G[:, p].copy()
                G[:, p] = c * gp - s * G[:, q]
                G[:, q] = s * gp + c * G[:, q]
                vp = V[:, p].copy()
                V[:, p] = c * vp - s * V[:, q]
                V[:, q] = s * vp + c * V[:, q]
        if not rotated:
            break
    else:
        raise np.linalg.LinAlgError(
            f"Jacobi SVD did not converge within {max_sweeps} sweeps "
            f"on a {rows}x{cols} matrix"
        )

    sigma = np.linalg.norm(G, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    G = G[:, order]
    V = V[:, order]
    U = np.zeros((rows, cols))
    for j in range(cols):
        if sigma[j] > 0.0:
            U[:, j] = G[:, j] / sigma[j]
    for j in range(cols):
        if sigma[j] == 0.0:
            _complete_orthonormal(U, j)
    return SVDResult(U=U, singular_values=sigma, V=V)


class LinearOperator:
    """A linear map given by forward and transpose application callbacks.

    Used for both explicitly stored matrices and structured operators
    (e.g. separable 2-D blur) that are never materialized during solves.
    """

    def __init__(
        self,
        n_rows: int,
        n_cols: int,
        apply: Callable[[np.ndarray], np.ndarray],
        apply_transpose: Callable[[np.ndarray], np.ndarray],
        kind: str = "dense",
        materialize: Callable[[], np.ndarray] | None = None,
    ):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self._apply = apply
        self._apply_transpose = apply_transpose
        self.kind = kind
        self._materialize = materialize

    @property
    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    def apply(self, v: np.ndarray) -> np.ndarray:
        if v.shape != (self.n_cols,):
            raise ValueError(f"expected vector of length {self.n_cols}, got {v.shape}")
        return self._apply(v)

    def apply_transpose(self, v: np.ndarray) -> np.ndarray:
        if v.shape != (self.n_rows,):
            raise ValueError(f"expected vector of length {self.n_rows}, got {v.shape}")
        return self._apply_transpose(v)

    def __matmul__(self, v: np.ndarray) -> np.ndarray:
        return self.apply(v)

    def to_dense(self) -> np.ndarray:
        """Materialize the operator as a dense array (desk scale only)."""
        if self._materialize is not None:
            return self._materialize()
        cols = []
        e = np.zeros(self.n_cols)
        for j in range(self.n_cols):
            e[j] = 1.0
            cols.append(self.apply(e.copy()))
            e[j] = 0.0
        return np.column_stack(cols)


def dense_operator(M) -> LinearOperator:
    """Wrap a dense matrix as a LinearOperator.

    An exactly symmetric matrix reuses the forward product for the
    transpose, so both directions round identically; the three-term
    recurrences downstream rely on that to collapse cleanly in the
    symmetric case.
    """
    M = _as_matrix(M)
    forward = lambda v: M @ v
    if M.shape[0] == M.shape[1] and np.array_equal(M, M.T):
        transpose = forward
    else:
        transpose = lambda v: M.T @ v
    return LinearOperator(
        n_rows=M.shape[0],
        n_cols=M.shape[1],
        apply=forward,
        apply_transpose=transpose,
        kind="dense",
        materialize=lambda: M,
    )
