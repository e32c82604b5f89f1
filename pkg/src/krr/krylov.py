"""Krylov basis construction: the Arnoldi process and Lanczos bi-orthogonalization.

Both builders extend one step at a time, so iterative solvers can grow the
decomposition lazily and snapshot it at any point.  A finished decomposition
is a frozen value object.

Shapes follow the rectangular convention: after ``m`` completed steps the
basis has ``m + 1`` columns and the projected matrix is ``(m+1) x m``.  When
the process breaks down at step ``m`` (the new direction vanishes) no
``m+1``-st basis vector exists, so the snapshot degrades to an ``m``-column
basis with a square ``m x m`` projected matrix; that square system is exact
in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import LinearOperator, _as_vector

# Relative threshold below which a new basis direction counts as vanished.
BREAKDOWN_RTOL = 1e-12


@dataclass(frozen=True)
class ArnoldiDecomposition:
    """Orthonormal basis V and upper Hessenberg projection H with A V_m = V_{m+1} H."""

    V: np.ndarray
    H: np.ndarray
    steps: int
    beta: float
    breakdown: bool


@dataclass(frozen=True)
class BiLanczosDecomposition:
    """Bi-orthogonal bases V, W (W^T V = I) and tridiagonal projection T.

    ``alphas``, ``betas`` and ``deltas`` are the raw three-term recurrence
    coefficients; T is assembled from them (diagonal, superdiagonal and
    subdiagonal respectively).
    """

    V: np.ndarray
    W: np.ndarray
    T: np.ndarray
    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    deltas: tuple[float, ...]
    steps: int
    beta: float
    breakdown: bool


class ArnoldiProcess:
    """Incremental Arnoldi with modified Gram-Schmidt plus one reorthogonalization.

    The extra orthogonalization pass keeps ``max|V^T V - I|`` near 1e-14 for
    basis sizes in the hundreds, which plain (modified) Gram-Schmidt does not.
    """

    def __init__(self, A: LinearOperator, r0: np.ndarray):
        if not A.is_square:
            raise ValueError(f"operator must be square, got {A.n_rows}x{A.n_cols}")
        r0 = _as_vector(r0, "r0")
        beta = float(np.linalg.norm(r0))
        if beta == 0.0:
            raise ValueError("starting vector must be nonzero")
        self.A = A
        self.beta = beta
        self._vs: list[np.ndarray] = [r0 / beta]
        self._cols: list[np.ndarray] = []
        self.breakdown = False
        self._op_scale = 0.0

    @property
    def steps(self) -> int:
        return len(self._cols)

    def step(self) -> bool:
        """Advance one step.  Returns False (and stops) on breakdown."""
        if self.breakdown:
            return False
        j = len(self._cols)
        w = self.A.apply(self._vs[j])
        self._op_scale = max(self._op_scale, float(np.linalg.norm(w)))
        h = np.zeros(j + 2)
        for i, vi in enumerate(self._vs):
            h[i] = vi @ w
            w = w - h[i] * vi
        for i, vi in enumerate(self._vs):
            corr = vi @ w
            w = w - corr * vi
            h[i] += corr
        h_next = float(np.linalg.norm(w))
        if h_next <= BREAKDOWN_RTOL * self._op_scale:
            self.breakdown = True
            self._cols.append(h[: j + 1])
            return False
        h[j + 1] = h_next
        self._cols.append(h)
        self._vs.append(w / h_next)
        return True

    def basis(self) -> np.ndarray:
        return np.column_stack(self._vs)

    def projected(self) -> np.ndarray:
        """Current Hessenberg matrix, (steps+1) x steps, or square on breakdown."""
        k = len(self._cols)
        rows = len(self._vs)
        H = np.zeros((rows, k))
        for j, col in enumerate(self._cols):
            H[: len(col), j] = col
        return H

    def decomposition(self) -> ArnoldiDecomposition:
        return ArnoldiDecomposition(
            V=self.basis(),
            H=self.projected(),
            steps=self.steps,
            beta=self.beta,
            breakdown=self.breakdown,
        )


def arnoldi(A: LinearOperator, r0: np.ndarray, m: int) -> ArnoldiDecomposition:
    """Run up to m Arnoldi steps from r0; stops early on breakdown."""
    if m < 1:
        raise ValueError("need at least one step")
    proc = ArnoldiProcess(A, r0)
    for _ in range(m):
        if not proc.step():
            break
    return proc.decomposition()


class BiLanczosProcess:
    """Incremental Lanczos bi-orthogonalization for A and A^T.

    Starts from ``v1 = b / ||b||`` and ``w1 = v1`` (so the pairing
    ``(v1, w1) = 1`` holds and the recurrence collapses to symmetric Lanczos
    whenever A is symmetric).  No look-ahead: a vanishing pairing
    ``(v_hat, w_hat)`` of the candidate vectors stops the process.
    """

    def __init__(self, A: LinearOperator, b: np.ndarray):
        if not A.is_square:
            raise ValueError(f"operator must be square, got {A.n_rows}x{A.n_cols}")
        b = _as_vector(b, "b")
        beta = float(np.linalg.norm(b))
        if beta == 0.0:
            raise ValueError("starting vector must be nonzero")
        self.A = A
        self.beta = beta
        v1 = b / beta
        self._vs: list[np.ndarray] = [v1]
        self._ws: list[np.ndarray] = [v1.copy()]
        self.alphas: list[float] = []
        self.betas: list[float] = []  # beta_{j+1}, superdiagonal
        self.deltas: list[float] = []  # delta_{j+1}, subdiagonal
        self.breakdown = False

    @property
    def steps(self) -> int:
        return len(self.alphas)

    def step(self) -> bool:
        if self.breakdown:
            return False
        j = len(self.alphas)
        v = self._vs[j]
        w = self._ws[j]
        Av = self.A.apply(v)
        Atw = self.A.apply_transpose(w)
        alpha = float(Av @ w)
        v_hat = Av - alpha * v
        w_hat = Atw - alpha * w
        if j > 0:
            v_hat -= self.betas[j - 1] * self._vs[j - 1]
            w_hat -= self.deltas[j - 1] * self._ws[j - 1]
        v_norm = float(np.linalg.norm(v_hat))
        w_norm = float(np.linalg.norm(w_hat))
        pairing = float(v_hat @ w_hat)
        # lucky breakdown: a candidate direction vanished relative to the
        # products that produced it; serious breakdown: the candidates are
        # (numerically) orthogonal to each other while nonzero
        vanished = v_norm <= BREAKDOWN_RTOL * np.linalg.norm(Av) or w_norm <= (
            BREAKDOWN_RTOL * np.linalg.norm(Atw)
        )
        if vanished or abs(pairing) <= BREAKDOWN_RTOL * v_norm * w_norm:
            self.breakdown = True
            self.alphas.append(alpha)
            return False
        delta_next = float(np.sqrt(abs(pairing)))
        # pairing / delta equals +/- delta exactly; copysign avoids the
        # one-ulp rounding that would split the recurrences on symmetric A
        beta_next = float(np.copysign(delta_next, pairing))
        self.alphas.append(alpha)
        self.deltas.append(delta_next)
        self.betas.append(beta_next)
        self._vs.append(v_hat / delta_next)
        self._ws.append(w_hat / beta_next)
        return True

    def basis(self) -> np.ndarray:
        return np.column_stack(self._vs)

    def left_basis(self) -> np.ndarray:
        return np.column_stack(self._ws)

    def projected(self) -> np.ndarray:
        """Current tridiagonal matrix, (steps+1) x steps, or square on breakdown."""
        k = len(self.alphas)
        rows = len(self._vs)
        T = np.zeros((rows, k))
        for j in range(k):
            T[j, j] = self.alphas[j]
            if j + 1 < rows:
                T[j + 1, j] = self.deltas[j]
            if j + 1 < k:
                T[j, j + 1] = self.betas[j]
        return T

    def decomposition(self) -> BiLanczosDecomposition:
        k = len(self.alphas)
        return BiLanczosDecomposition(
            V=self.basis(),
            W=self.left_basis(),
            T=self.projected(),
            alphas=tuple(self.alphas),
            betas=tuple(self.betas),
            deltas=tuple(self.deltas),
            steps=k,
            beta=self.beta,
            breakdown=self.breakdown,
        )


def bilanczos(A: LinearOperator, b: np.ndarray, m: int) -> BiLanczosDecomposition:
    """Run up to m bi-orthogonalization steps from b; stops early on breakdown."""
    if m < 1:
        raise ValueError("need at least one step")
    proc = BiLanczosProcess(A, b)
    for _ in range(m):
        if not proc.step():
            break
    return proc.decomposition()
