"""
Sampled derivative bounds over a ball
=====================================

m(R)  = sup ||[F'(u)]^{-1}||  = sup 1/sigma_min(F'(u))
M1(R) = sup ||F'(u)||        = sup sigma_max(F'(u))
M2(R) = sup ||F''(u)||, probed as ||(F'(u + h d) - F'(u - h d)) / 2h|| along unit directions d

Suprema over an uncountable ball are replaced by maxima over seeded uniform
samples (center always included), so every estimate is a lower bound on the
true value. One-dimensional balls are also swept on a 1001-point grid, which
makes the estimates tight to grid resolution.
"""

from typing import Iterator, Tuple

import numpy as np

from ..core.problem import Ball, NonlinearProblem, Vector
from ..core.utils import (
    SINGULAR_RCOND,
    interval_grid,
    iter_ball_samples,
    random_unit_vector,
    singular_values,
    spectral_norm,
)
from ..core.validators import ContractViolation
from ..logging_config import get_logger, log_execution_time
from ..models import ConditionEstimate

logger = get_logger("dsm_solver.certificates")

GRID_POINTS_1D = 1001
M2_STEP = 1e-4


def validate_sampling(problem: NonlinearProblem, ball: Ball, sample_count: int, seed: int) -> None:
    if int(sample_count) < 1:
        raise ContractViolation(f"sample_count must be >= 1 (got {sample_count})")
    if int(seed) < 0:
        raise ContractViolation(f"seed must be a nonnegative integer (got {seed})")
    if ball.dimension != problem.dimension:
        raise ContractViolation(
            f"ball dimension {ball.dimension} does not match problem dimension {problem.dimension}"
        )


def iter_estimation_points(ball: Ball, sample_count: int, seed: int) -> Iterator[Vector]:
    """Seeded ball samples followed, for 1-D balls, by the uniform interval grid"""
    yield from iter_ball_samples(ball, sample_count, seed)
    if ball.dimension == 1:
        for x in interval_grid(ball, GRID_POINTS_1D):
            yield np.array([x])


def jacobian_extremes(problem: NonlinearProblem, u: Vector) -> Tuple[float, float]:
    """(||F'(u)^{-1}||, ||F'(u)||); the inverse norm is +inf when sigma_min < 1e-14 sigma_max"""
    sigma_min, sigma_max = singular_values(problem.jacobian(u))
    if sigma_max == 0.0 or sigma_min < SINGULAR_RCOND * sigma_max:
        return float("inf"), sigma_max
    return 1.0 / sigma_min, sigma_max


def second_derivative_norm(problem: NonlinearProblem, u: Vector, direction: Vector) -> float:
    """||(F'(u + h d) - F'(u - h d)) / 2h|| with h = 1e-4 (1 + ||u||)"""
    h = M2_STEP * (1.0 + float(np.linalg.norm(u)))
    difference = problem.jacobian(u + h * direction) - problem.jacobian(u - h * direction)
    return spectral_norm(difference / (2.0 * h))


def _scan_ball(problem: NonlinearProblem, ball: Ball, sample_count: int, seed: int,
               with_second_derivative: bool) -> ConditionEstimate:
    validate_sampling(problem, ball, sample_count, seed)
    # directions come from their own stream so the sample points match estimate_m
    direction_rng = np.random.default_rng([int(seed), 1])

    m_hat, M1_hat, M2_hat = -1.0, -1.0, -1.0
    witness_m = witness_M1 = witness_M2 = ball.center
    evaluated = 0

    for u in iter_estimation_points(ball, int(sample_count), int(seed)):
        evaluated += 1
        inv_norm, norm = jacobian_extremes(problem, u)
        if inv_norm > m_hat:
            m_hat, witness_m = inv_norm, u
        if norm > M1_hat:
            M1_hat, witness_M1 = norm, u

        if with_second_derivative:
            direction = random_unit_vector(direction_rng, ball.dimension)
            curvature = second_derivative_norm(problem, u, direction)
            if curvature > M2_hat:
                M2_hat, witness_M2 = curvature, u

    grid_points = evaluated - int(sample_count)
    if np.isinf(m_hat):
        logger.warning("Singular Jacobian among samples", problem=problem.name,
                       witness=witness_m.tolist())

    return ConditionEstimate(
        ball=ball,
        m_hat=m_hat,
        M1_hat=M1_hat,
        sample_count=int(sample_count),
        witness_m=np.array(witness_m),
        witness_M1=np.array(witness_M1),
        seed=int(seed),
        grid_points=grid_points,
        M2_hat=M2_hat if with_second_derivative else None,
        witness_M2=np.array(witness_M2) if with_second_derivative else None,
    )


@log_execution_time("estimate_m")
def estimate_m(problem: NonlinearProblem, ball: Ball, sample_count: int, seed: int) -> ConditionEstimate:
    """
    Sampled m(R) and M1(R)

    Args:
        problem: The map F
        ball: B(u0, R)
        sample_count: Number of seeded uniform samples, center included
        seed: Sampling seed

    Returns:
        ConditionEstimate with m_hat = max 1/sigma_min and M1_hat = max sigma_max;
        m_hat is +inf when some sample has a numerically singular Jacobian
    """
    return _scan_ball(problem, ball, sample_count, seed, with_second_derivative=False)


@log_execution_time("estimate_derivative_bounds")
def estimate_derivative_bounds(problem: NonlinearProblem, ball: Ball, sample_count: int,
                               seed: int) -> ConditionEstimate:
    """
    Sampled m(R), M1(R) and M2(R)

    Each sample is paired with one seeded unit direction for the central
    difference of F'. The sample points are the ones estimate_m uses.
    """
    return _scan_ball(problem, ball, sample_count, seed, with_second_derivative=True)


__all__ = [
    'estimate_m',
    'estimate_derivative_bounds',
    'iter_estimation_points',
    'jacobian_extremes',
    'second_derivative_norm',
    'GRID_POINTS_1D',
]
