"""
DSM Solver Certificates
Sampled derivative bounds and the condition checks built on them
"""

from .checks import (
    check_hadamard_ball,
    check_trap_containment,
    check_velocity_bound,
    hadamard_check,
    hadamard_constants,
    surjectivity_scan,
    trap_ball_check,
    verify_convergence_bound,
)
from .estimates import estimate_derivative_bounds, estimate_m

__all__ = [
    "estimate_m",
    "estimate_derivative_bounds",
    "trap_ball_check",
    "surjectivity_scan",
    "hadamard_constants",
    "hadamard_check",
    "verify_convergence_bound",
    "check_velocity_bound",
    "check_trap_containment",
    "check_hadamard_ball",
]
