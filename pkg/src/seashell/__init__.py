"""Potential reconstruction for Robin Sturm-Liouville problems from finite spectral data.

The pipeline solves the Gelfand-Levitan integral equation with a degenerate
(finite trigonometric) kernel, so every step is a closed-form linear-algebra
problem, and attaches an a-priori error certificate when the data allow it.
"""
from .certify import Certificate, c_m1, certify, inverse_norm_bracket, riesz_constant
from .errors import (CertificateRefused, DomainError, GlmSingularError, NumericalError,
                     SeashellError, ValidationError)
from .glm_solver import KNEvaluator, eval_K, solve_nystrom
from .reconstruction import Reconstruction, reconstruct
from .spectral_data import (SpectralData, decompose, detect_finite_rank, estimate_omega,
                            validate)
from .trig_kernel import KernelFN, eval_F

__version__ = "0.1.0"

__all__ = [
    "Certificate", "CertificateRefused", "DomainError", "GlmSingularError", "KNEvaluator",
    "KernelFN", "NumericalError", "Reconstruction", "SeashellError", "SpectralData",
    "ValidationError", "__version__", "c_m1", "certify", "decompose", "detect_finite_rank",
    "estimate_omega", "eval_F", "eval_K", "inverse_norm_bracket", "reconstruct",
    "riesz_constant", "solve_nystrom", "validate",
]
