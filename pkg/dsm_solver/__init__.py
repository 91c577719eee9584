"""
DSM Solver - Dynamical Systems Method for F(u) = f
==================================================

Solves nonlinear equations by integrating the continuous Newton flow

    u' = -[F'(u)]^{-1} (F(u) - f),    u(0) = u0

along which the residual decays exactly as g(t) = g(0) e^{-t}. Around the
integrator sit:
- Sampled bounds m(R), M1(R), M2(R) over balls and the trap-ball, surjectivity
  and Hadamard-growth certificates built on them
- Homotopy sweeps that flow from every node of a segment path and compare
  the limits, plus a stability check for perturbed starts
- A registry of benchmark problems with known roots and bounds
- CSV/JSON trace output and the ``dsm`` command-line interface

Quick Start:
    from dsm_solver import build_problem, solve_dsm, check_residual_law

    problem = build_problem("monotone_cubic")
    result = solve_dsm(problem, u0=[0.0], f=[2.0])
    print(result.status, result.u_final)          # Converged [1.]
    print(check_residual_law(result.trajectory))  # slope ~ -1

Certificates:
    from dsm_solver import Ball, estimate_m, trap_ball_check

    estimate = estimate_m(problem, Ball([0.0], 2.0), sample_count=2000, seed=7)
    certificate = trap_ball_check(estimate.m_hat, g0=2.0, R=2.0)

Components:
    - core: problem model, validation, sampling and norms
    - flow: DOPRI5 integration of the Newton flow
    - certificates: derivative bounds and condition checks
    - homotopy: injectivity sweeps and stability checks
    - problems: built-in problem registry
    - export: trace and document writers
"""

__version__ = "1.0.0"
__author__ = "DSM Solver Development Team"

# Core imports for easy access
from .certificates import (
    estimate_derivative_bounds,
    estimate_m,
    hadamard_constants,
    surjectivity_scan,
    trap_ball_check,
    verify_convergence_bound,
)
from .config import DSMSettings, settings
from .core import (
    Ball,
    ContractViolation,
    DSMError,
    EvaluationError,
    NonlinearProblem,
    SingularJacobianError,
    evaluate_residual,
    finite_difference_jacobian,
)
from .flow import check_residual_law, newton_direction, solve_dsm
from .homotopy import injectivity_sweep, segment_path, stability_check
from .logging_config import configure_structured_logging, get_logger
from .models import FlowConfig, HadamardBounds, PathSpec, SolveStatus
from .problems import build_problem, get_descriptor, registry_list

__all__ = [
    'NonlinearProblem',
    'Ball',
    'evaluate_residual',
    'finite_difference_jacobian',
    'FlowConfig',
    'SolveStatus',
    'newton_direction',
    'solve_dsm',
    'check_residual_law',
    'estimate_m',
    'estimate_derivative_bounds',
    'trap_ball_check',
    'surjectivity_scan',
    'HadamardBounds',
    'hadamard_constants',
    'verify_convergence_bound',
    'PathSpec',
    'segment_path',
    'injectivity_sweep',
    'stability_check',
    'registry_list',
    'get_descriptor',
    'build_problem',
    'DSMSettings',
    'settings',
    'get_logger',
    'configure_structured_logging',
    'DSMError',
    'ContractViolation',
    'EvaluationError',
    'SingularJacobianError',
    '__version__',
]

# Package metadata
PACKAGE_INFO = {
    'name': 'dsm-solver',
    'version': __version__,
    'description': 'Dynamical Systems Method solver with Newton-flow certificates and homotopy sweeps',
    'author': __author__,
    'license': 'MIT',
    'requires': ['numpy', 'scipy', 'pydantic', 'pydantic-settings', 'structlog'],
    'optional_requires': {
        'dev': ['pytest', 'pytest-cov'],
    },
}
