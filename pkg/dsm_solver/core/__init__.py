"""
DSM Solver Core
Problem model, validation and numerical utilities
"""

from .problem import (
    Ball,
    NonlinearProblem,
    evaluate_residual,
    finite_difference_jacobian,
    product_problem,
)
from .utils import inverse_norm, iter_ball_samples, singular_values, spectral_norm
from .validators import (
    ContractViolation,
    DSMError,
    EvaluationError,
    InsufficientDataError,
    SingularJacobianError,
    UnknownProblemError,
    as_vector,
)

__all__ = [
    "Ball",
    "NonlinearProblem",
    "evaluate_residual",
    "finite_difference_jacobian",
    "product_problem",
    "inverse_norm",
    "iter_ball_samples",
    "singular_values",
    "spectral_norm",
    "DSMError",
    "ContractViolation",
    "EvaluationError",
    "InsufficientDataError",
    "SingularJacobianError",
    "UnknownProblemError",
    "as_vector",
]
