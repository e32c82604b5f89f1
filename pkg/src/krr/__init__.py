"""Krylov subspace solvers with range restriction for ill-posed linear systems.

The package bundles the solvers (GMRES, QMR and their shifted variants, plus
truncated SVD), classic 1-D/2-D test problems with controlled noise, and the
diagnostics used to study semiconvergence and projected singular spectra.
"""

from .analysis import (
    SpectrumReport,
    projected_spectrum,
    relative_error,
    relative_residual,
    semiconvergence_curve,
)
from .krylov import (
    ArnoldiDecomposition,
    BiLanczosDecomposition,
    arnoldi,
    bilanczos,
)
from .linalg import (
    LinearOperator,
    SVDResult,
    dense_operator,
    householder_qr,
    jacobi_svd,
    solve_upper_triangular,
)
from .output import emit_pgm, write_line_chart_svg
from .problems import NoisyData, ProblemInstance, add_noise, blur2d, phillips, shaw
from .solvers import (
    QRChain,
    SolveResult,
    StopReason,
    StoppingRule,
    build_qr_chain,
    discrepancy_stop,
    gmres,
    qmr,
    rr_gmres,
    rr_qmr,
    tsvd,
)

__all__ = [
    "ArnoldiDecomposition",
    "BiLanczosDecomposition",
    "LinearOperator",
    "NoisyData",
    "ProblemInstance",
    "QRChain",
    "SVDResult",
    "SolveResult",
    "SpectrumReport",
    "StopReason",
    "StoppingRule",
    "add_noise",
    "arnoldi",
    "bilanczos",
    "blur2d",
    "build_qr_chain",
    "dense_operator",
    "discrepancy_stop",
    "emit_pgm",
    "gmres",
    "householder_qr",
    "jacobi_svd",
    "phillips",
    "projected_spectrum",
    "qmr",
    "relative_error",
    "relative_residual",
    "rr_gmres",
    "rr_qmr",
    "semiconvergence_curve",
    "shaw",
    "solve_upper_triangular",
    "tsvd",
    "write_line_chart_svg",
]

__version__ = "0.1.0"
