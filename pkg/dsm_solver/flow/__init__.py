"""
Newton flow integration
Adaptive DOPRI5 integration of u' = -[F'(u)]^{-1}(F(u) - f) and the residual-law check.
"""

from .integrator import DormandPrince54, PIStepController, error_norm
from .newton_flow import check_residual_law, newton_direction, solve_dsm

__all__ = [
    "DormandPrince54",
    "PIStepController",
    "error_norm",
    "newton_direction",
    "solve_dsm",
    "check_residual_law",
]
