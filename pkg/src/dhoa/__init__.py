"""Deformed harmonic oscillator algebras rebuilt from Bargmann weight functions.

Typical use::

    from dhoa import MellinProfile, StretchedExp, build_algebra, verify_representation

    alg = build_algebra(MellinProfile(StretchedExp(1, 1)))
    alg.psi(3.0)                       # 3.0, the usual oscillator
    verify_representation(alg).verdict
"""
from .algebra import (
    CoherentDomain,
    DeformedAlgebra,
    DiagnosticsReport,
    Mode,
    SpectrumDescriptor,
    build_algebra,
    check_sufficient,
    dual_algebra,
    psi,
    psi_factorial,
)
from .bargmann import (
    TruncatedBasis,
    coherent_vector,
    eigen_residual,
    gram_matrix,
    kernel,
    operator_matrices,
    scalar_product,
    truncated_basis,
    verify_representation,
)
from .errors import ConstructionRejected, DomainError, NumericalFailure
from .mellin import (
    MellinProfile,
    RatioLimits,
    convergence_abscissa,
    mellin_transform,
    ratio_limits,
)
from .weightfn import (
    EssentialEdge,
    LogGaussian,
    Power,
    PowerBeta,
    StretchedExp,
    TabulatedPositive,
    edge_behavior,
    evaluate,
    from_params,
)

__version__ = "0.1.0"

__all__ = [
    "CoherentDomain", "DeformedAlgebra", "DiagnosticsReport", "Mode", "SpectrumDescriptor",
    "build_algebra", "check_sufficient", "dual_algebra", "psi", "psi_factorial",
    "TruncatedBasis", "coherent_vector", "eigen_residual", "gram_matrix", "kernel",
    "operator_matrices", "scalar_product", "truncated_basis", "verify_representation",
    "ConstructionRejected", "DomainError", "NumericalFailure",
    "MellinProfile", "RatioLimits", "convergence_abscissa", "mellin_transform", "ratio_limits",
    "EssentialEdge", "LogGaussian", "Power", "PowerBeta", "StretchedExp", "TabulatedPositive",
    "edge_behavior", "evaluate", "from_params",
]
