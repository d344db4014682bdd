"""Solver and certifier for extremal problems on positive definite functions.

Computes the largest normalized mean of a positive definite function subject
to sign constraints outside prescribed regions, on several families of compact
two-point homogeneous structures, together with machine-checkable dual
certificates that bound the optimum from above.
"""

__version__ = "0.1.0"

from .config import ConfigError, RunConfig, build_instance, load_config
from .dual import (
    CertificateFormatError,
    DualCertificate,
    ValidityReport,
    certificate_from_text,
    certificate_to_text,
    solve_dual,
    verify_certificate,
)
from .harness import (
    DualityReport,
    StrongDualityViolation,
    epsilon_limit_study,
    fuzz_strong_duality,
    run_instance,
)
from .primal import PrimalSolution, SigmaWeight, solve_primal
from .regions import RegionPair, validate, witness_function
from .scalars import (
    CyclotomicContext,
    FloatContext,
    RationalContext,
    exact_cosine_context,
    rational,
)
from .spectra import (
    CirclePair,
    DihedralPair,
    FiniteAbelian,
    SpherePair,
    analysis,
    build_structure,
    integrate,
    symmetrise,
    synthesis,
)

__all__ = [
    "CertificateFormatError",
    "CirclePair",
    "ConfigError",
    "CyclotomicContext",
    "DihedralPair",
    "DualCertificate",
    "DualityReport",
    "FiniteAbelian",
    "FloatContext",
    "PrimalSolution",
    "RationalContext",
    "RegionPair",
    "RunConfig",
    "SigmaWeight",
    "SpherePair",
    "StrongDualityViolation",
    "ValidityReport",
    "analysis",
    "build_instance",
    "build_structure",
    "certificate_from_text",
    "certificate_to_text",
    "epsilon_limit_study",
    "exact_cosine_context",
    "fuzz_strong_duality",
    "integrate",
    "load_config",
    "rational",
    "run_instance",
    "solve_dual",
    "solve_primal",
    "symmetrise",
    "synthesis",
    "validate",
    "verify_certificate",
    "witness_function",
]
