"""
Continuous Newton flow
======================

Integrates u' = -[F'(u)]^{-1}(F(u) - f) from u(0) = u0. Along the exact flow
the residual obeys g g' = -g^2, so g(t) = g(0) e^{-t} for every problem; the
flow stops on the residual norm, not on state increments.

Mathematical failure modes come back as SolveStatus values:
- Converged: g <= residual_tol
- EscapedBall: ||u - u0|| > escape_radius
- HorizonReached: t reached t_max (or max_steps accepted steps)
- SingularJacobian: LU pivot below 1e-12 * ||F'(u)||_inf
"""

import math
import warnings

import numpy as np
from numpy.typing import ArrayLike
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from ..core.problem import NonlinearProblem, Vector, evaluate_residual
from ..core.validators import (
    EvaluationError,
    InsufficientDataError,
    SingularJacobianError,
    as_vector,
    validate_dimension,
)
from ..logging_config import get_logger, log_execution_time
from ..models import (
    FlowConfig,
    ResidualLawCheck,
    SolveResult,
    SolveStatus,
    Trajectory,
    TrajectoryPoint,
)
from .integrator import DormandPrince54, PIStepController, error_norm

logger = get_logger("dsm_solver.flow")

PIVOT_RTOL = 1e-12
MIN_LAW_POINTS = 10


def newton_direction(problem: NonlinearProblem, u: ArrayLike, f: ArrayLike) -> Vector:
    """
    Solve F'(u) v = F(u) - f by LU with partial pivoting

    The flow's right-hand side is -v.

    Raises:
        SingularJacobianError: smallest pivot below 1e-12 * ||F'(u)||_inf
    """
    u = as_vector(u, "u")
    residual, _ = evaluate_residual(problem, u, f)
    jacobian = problem.jacobian(u)

    scale = float(np.linalg.norm(jacobian, np.inf))
    with warnings.catch_warnings():
        # exact zero pivots are reported below
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(jacobian, check_finite=False)

    pivot = float(np.min(np.abs(np.diag(lu))))
    if scale == 0.0 or pivot < PIVOT_RTOL * scale:
        raise SingularJacobianError(u, pivot)

    return lu_solve((lu, piv), residual, check_finite=False)


@log_execution_time("solve_dsm")
def solve_dsm(problem: NonlinearProblem, u0: ArrayLike, f: ArrayLike,
              config: FlowConfig = None) -> SolveResult:
    """
    Integrate the Newton flow with DOPRI5 and PI step control

    Every accepted step is recorded. The initial condition is the first
    trajectory point with step_accepted=False.

    Args:
        problem: The map F
        u0: Initial state
        f: Right-hand side
        config: Tolerances, horizon and optional escape radius

    Returns:
        SolveResult whose status reports the stop condition
    """
    config = config or FlowConfig()
    u0 = as_vector(u0, "u0")
    f = as_vector(f, "f")
    validate_dimension(u0, problem.dimension, "u0")
    validate_dimension(f, problem.dimension, "f")

    def rhs(u: Vector) -> Vector:
        return -newton_direction(problem, u, f)

    stepper = DormandPrince54(rhs)
    controller = PIStepController(safety=config.safety)
    trajectory = Trajectory()

    _, g = evaluate_residual(problem, u0, f)
    logger.log_solve_start(problem.name, problem.dimension, g)

    def finish(status: SolveStatus, u: Vector, g_final: float) -> SolveResult:
        trajectory.status = status
        logger.log_solve_complete(
            status.value,
            t_final=trajectory.points[-1].t,
            g_final=g_final,
            steps=trajectory.accepted_steps,
            rejected=trajectory.rejected_steps,
            rhs_evaluations=stepper.evaluations,
        )
        return SolveResult(status=status, trajectory=trajectory, u_final=np.array(u), g_final=g_final)

    try:
        k1 = rhs(u0)
    except SingularJacobianError:
        trajectory.append(TrajectoryPoint(0.0, u0, g, math.inf, False))
        return finish(SolveStatus.SINGULAR_JACOBIAN, u0, g)
    stepper.evaluations += 1

    trajectory.append(TrajectoryPoint(0.0, u0, g, float(np.linalg.norm(k1)), False, k1))
    if g <= config.residual_tol:
        return finish(SolveStatus.CONVERGED, u0, g)

    u, t = u0, 0.0
    h = min(max(config.initial_step, config.min_step), config.max_step)

    while True:
        if t >= config.t_max or trajectory.accepted_steps >= config.max_steps:
            return finish(SolveStatus.HORIZON_REACHED, u, g)
        h = min(h, config.t_max - t)

        try:
            u_new, local_error, k_new = stepper.step(u, h, k1)
        except SingularJacobianError as e:
            logger.warning("Singular Jacobian inside step", t=t, h=h, pivot=e.pivot)
            return finish(SolveStatus.SINGULAR_JACOBIAN, u, g)
        except EvaluationError:
            if h <= config.min_step:
                raise
            trajectory.rejected_steps += 1
            h = max(h * controller.min_factor, config.min_step)
            continue

        err = error_norm(local_error, u, u_new, config.rk_rel_tol, config.rk_abs_tol)
        if err > 1.0:
            if h > config.min_step:
                trajectory.rejected_steps += 1
                h = max(h * controller.reject(err), config.min_step)
                continue
            logger.log_step_floor(t=t, h=h, error_norm=err)

        t += h
        u, k1 = u_new, k_new
        _, g = evaluate_residual(problem, u, f)
        trajectory.append(TrajectoryPoint(t, u, g, float(np.linalg.norm(k1)), True, k1))

        if g <= config.residual_tol:
            return finish(SolveStatus.CONVERGED, u, g)
        if config.escape_radius is not None and np.linalg.norm(u - u0) > config.escape_radius:
            return finish(SolveStatus.ESCAPED_BALL, u, g)

        h = min(max(h * controller.accept(err), config.min_step), config.max_step)


def check_residual_law(trajectory: Trajectory, slope_tol: float = 1e-6) -> ResidualLawCheck:
    """
    Fit ln g(t) against t and compare with the exact law g(t) = g(0) e^{-t}

    Points after the first exact zero residual are ignored.

    Returns:
        (slope, max pointwise deviation |ln g(t_i) - ln g(0) + t_i|, pass)

    Raises:
        InsufficientDataError: fewer than 10 points with g > 0
    """
    g = trajectory.residuals
    t = trajectory.times

    zeros = np.flatnonzero(g <= 0.0)
    usable = int(zeros[0]) if zeros.size else g.size
    if usable < MIN_LAW_POINTS:
        raise InsufficientDataError(
            f"residual law needs {MIN_LAW_POINTS} points with g > 0, got {usable}"
        )

    t = t[:usable]
    log_g = np.log(g[:usable])
    slope, _ = np.polyfit(t, log_g, 1)
    max_deviation = float(np.max(np.abs(log_g - (log_g[0] - t))))

    passed = abs(slope + 1.0) <= slope_tol and max_deviation <= 10.0 * slope_tol
    return ResidualLawCheck(float(slope), max_deviation, bool(passed))


__all__ = [
    'newton_direction',
    'solve_dsm',
    'check_residual_law',
    'PIVOT_RTOL',
]
