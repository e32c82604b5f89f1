"""Test problems: 1-D Fredholm discretizations, separable 2-D blur, seeded noise.

All generators return a consistent bundle (operator, true solution, exact
data) with ``b_exact = A @ x_true`` by construction, so reconstruction error
measures regularization quality only and carries no discretization mismatch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import LinearOperator, dense_operator


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    A: LinearOperator
    x_true: np.ndarray
    b_exact: np.ndarray
    image_dims: tuple[int, int] | None = None


@dataclass(frozen=True)
class NoisyData:
    """Perturbed right-hand side b = b_exact + e at a prescribed noise level."""

    b: np.ndarray
    e: np.ndarray
    noise_level_percent: float
    seed: int


def phillips(n: int) -> ProblemInstance:
    """Phillips integral-equation problem on [-6, 6].

    Kernel 1 + cos(pi (s - t) / 3) where |s - t| < 3 (zero elsewhere),
    discretized on a uniform n-point grid including the endpoints with
    equal quadrature weight h = 12 / (n - 1) at every node, which keeps
    the matrix exactly symmetric.  The true solution is the matching
    piecewise cosine bump 1 + cos(pi t / 3) on |t| < 3.
    """
    if n < 8:
        raise ValueError(f"need n >= 8, got {n}")
    t = np.linspace(-6.0, 6.0, n)
    h = 12.0 / (n - 1)
    diff = np.abs(np.subtract.outer(t, t))
    K = np.where(diff < 3.0, 1.0 + np.cos(np.pi * diff / 3.0), 0.0)
    A = h * K
    x_true = np.where(np.abs(t) < 3.0, 1.0 + np.cos(np.pi * t / 3.0), 0.0)
    b_exact = A @ x_true
    return ProblemInstance(name="phillips", A=dense_operator(A), x_true=x_true, b_exact=b_exact)


def shaw(n: int) -> ProblemInstance:
    """Shaw 1-D image restoration problem on [-pi/2, pi/2].

    Kernel (cos s + cos t)^2 * (sin(u)/u)^2 with u = pi (sin s + sin t);
    the true solution is a pair of Gaussians, the taller one centered at
    t = 0.8.  Severely ill-posed: singular values decay past machine
    precision within a few dozen indices.
    """
    if n < 8:
        raise ValueError(f"need n >= 8, got {n}")
    t = np.linspace(-np.pi / 2.0, np.pi / 2.0, n)
    h = np.pi / (n - 1)
    cos_sum = np.add.outer(np.cos(t), np.cos(t))
    sin_sum = np.add.outer(np.sin(t), np.sin(t))
    # np.sinc(x) = sin(pi x) / (pi x), so sinc(sin s + sin t) = sin(u)/u
    K = cos_sum**2 * np.sinc(sin_sum) ** 2
    A = h * K
    x_true = 2.0 * np.exp(-6.0 * (t - 0.8) ** 2) + np.exp(-2.0 * (t + 0.5) ** 2)
    b_exact = A @ x_true
    return ProblemInstance(name="shaw", A=dense_operator(A), x_true=x_true, b_exact=b_exact)


def _blur_factor(N: int, band: int, sigma: float) -> np.ndarray:
    """Banded symmetric Toeplitz factor of the separable Gaussian PSF.

    Normalized by the full (untruncated) stencil weight so interior rows
    sum to one exactly and a bandwidth of 1 gives the identity.
    """
    k = np.arange(band)
    g = np.exp(-(k.astype(float) ** 2) / (2.0 * sigma**2))
    weight = g[0] + 2.0 * g[1:].sum()
    offsets = np.abs(np.subtract.outer(np.arange(N), np.arange(N)))
    T = np.where(offsets < band, np.exp(-(offsets.astype(float) ** 2) / (2.0 * sigma**2)), 0.0)
    return T / weight


def _test_image(N: int) -> np.ndarray:
    """Piecewise-constant test scene: two rectangles and a dot grid, in [0, 1]."""
    img = np.zeros((N, N))
    img[N // 8 : N // 2, N // 8 : 5 * N // 8] = 0.6
    img[N // 3 : 3 * N // 4, N // 2 : 7 * N // 8] = 1.0
    step = max(2, N // 8)
    for i in range(5 * N // 8, N - 1, step):
        for j in range(N // 8, N // 2, step):
            img[i, j] = 0.9
    return img


def blur2d(N: int, band: int = 9, sigma: float = 2.0) -> ProblemInstance:
    """Separable Gaussian deblurring problem on an N x N image.

    The operator is the Kronecker product of two banded Toeplitz factors
    (zero boundary conditions) and is applied matrix-free as
    T @ X @ T on the reshaped image, never assembled.  Vectors use
    column-major (Fortran) flattening of the image.
    """
    if N < 8:
        raise ValueError(f"need N >= 8, got {N}")
    if not 1 <= band <= N:
        raise ValueError(f"band must be in [1, {N}], got {band}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    T = _blur_factor(N, band, sigma)
    n = N * N

    def apply(v: np.ndarray) -> np.ndarray:
        X = v.reshape((N, N), order="F")
        return (T @ X @ T).ravel(order="F")

    A = LinearOperator(
        n_rows=n,
        n_cols=n,
        apply=apply,
        apply_transpose=apply,  # T is symmetric, so the product is too
        kind="kronecker-blur",
        materialize=lambda: np.kron(T, T),
    )
    x_true = _test_image(N).ravel(order="F")
    b_exact = apply(x_true)
    return ProblemInstance(
        name="blur2d", A=A, x_true=x_true, b_exact=b_exact, image_dims=(N, N)
    )


def add_noise(p: ProblemInstance, level_percent: float, seed: int) -> NoisyData:
    """Perturb b_exact with Gaussian noise scaled to an exact relative norm.

    The noise direction is drawn from numpy's seeded PCG64 generator and
    rescaled so that ``||e|| = (level_percent / 100) * ||b_exact||`` holds to
    machine precision; the same (problem, level, seed) triple always yields
    the same bytes.
    """
    if level_percent < 0:
        raise ValueError("noise level must be non-negative")
    n = p.b_exact.shape[0]
    if level_percent == 0.0:
        e = np.zeros(n)
    else:
        rng = np.random.default_rng(seed)
        e = rng.standard_normal(n)
        e *= (level_percent / 100.0) * np.linalg.norm(p.b_exact) / np.linalg.norm(e)
    return NoisyData(
        b=p.b_exact + e, e=e, noise_level_percent=float(level_percent), seed=int(seed)
    )
