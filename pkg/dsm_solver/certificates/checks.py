"""
Certificate checks
==================

Machine-checkable versions of the conditions behind the flow's convergence
theory, each returned with the witnesses needed to reproduce the verdict:

- trap ball         m(R) g(0) <= R
- surjectivity      sup_R R / m(R) = infinity (finite-grid growth heuristic)
- Hadamard growth   ||[F'(u)]^{-1}|| <= a ||u|| + b, with constants c1, c2

and the trajectory-level consequences: the velocity bound, trap-ball
containment, the convergence envelope and the Hadamard ball.

Provides:
- trap_ball_check, surjectivity_scan, hadamard_constants, hadamard_check
- verify_convergence_bound, check_velocity_bound, check_trap_containment,
  check_hadamard_ball

Used by:
- cli (certify, scan subcommands)
- test_certificates
"""

import math
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike

from ..core.problem import Ball, NonlinearProblem
from ..core.utils import inputs_digest
from ..core.validators import ContractViolation, as_vector, validate_increasing_grid
from ..logging_config import get_logger, log_execution_time
from ..models import (
    BoundCheck,
    Certificate,
    CertificateKind,
    HadamardBounds,
    HadamardConstants,
    SolveStatus,
    Trajectory,
)
from .estimates import estimate_m, iter_estimation_points, jacobian_extremes, validate_sampling

logger = get_logger("dsm_solver.certificates")

SURJECTIVITY_LABEL = (
    "heuristic: holds when R/m(R) grows by at least sqrt(R_max/R_min) across the grid; "
    "the condition quantifies over all R > 0 and cannot be decided from finite data"
)


def trap_ball_check(m_hat: float, g0: float, R: float) -> Certificate:
    """
    Trap-ball condition m(R) g(0) <= R (inclusive)

    Total: an infinite m_hat never holds.

    Args:
        m_hat: Estimate of m(R)
        g0: Initial residual norm
        R: Ball radius

    Returns:
        Certificate with witnesses m_hat, g0, R, m_hat_times_g0 and slack R - m_hat g0
    """
    m_hat, g0, R = float(m_hat), float(g0), float(R)
    if math.isfinite(m_hat):
        product = m_hat * g0
        slack = R - product
        holds = product <= R
    else:
        product, slack, holds = math.inf, -math.inf, False

    certificate = Certificate(
        kind=CertificateKind.TRAP_BALL,
        holds=holds,
        witnesses={"m_hat": m_hat, "g0": g0, "R": R, "m_hat_times_g0": product, "slack": slack},
        inputs_digest=inputs_digest(m_hat=m_hat, g0=g0, R=R),
    )
    logger.log_certificate(certificate.kind.value, holds, slack=slack)
    return certificate


@log_execution_time("surjectivity_scan")
def surjectivity_scan(problem: NonlinearProblem, u0: ArrayLike, R_grid: Sequence[float],
                      sample_count: int, seed: int) -> Certificate:
    """
    Tabulate R / m_hat(R) over a radius grid

    holds iff the ratio at the largest R exceeds the ratio at the smallest R
    by at least (R_max / R_min)^0.5. The witness carries the label marking
    this as a heuristic.

    Args:
        problem: The map F
        u0: Common ball center
        R_grid: Nonempty, strictly increasing radii
        sample_count: Samples per ball
        seed: Sampling seed, shared by every ball

    Returns:
        Certificate(kind=Surjectivity) with the table, max ratio and growth factor
    """
    u0 = as_vector(u0, "u0")
    grid = validate_increasing_grid(R_grid, "R_grid")

    table = []
    for R in grid:
        estimate = estimate_m(problem, Ball(u0, float(R)), sample_count, seed)
        ratio = float(R) / estimate.m_hat if estimate.m_hat > 0 else math.inf
        table.append({
            "R": float(R),
            "m_hat": estimate.m_hat,
            "ratio": ratio,
            "witness": estimate.witness_m.tolist(),
        })

    ratios = np.array([row["ratio"] for row in table])
    peak = int(np.argmax(ratios))
    first, last = float(ratios[0]), float(ratios[-1])
    if first > 0:
        growth = last / first
    else:
        growth = math.inf if last > 0 else 0.0
    required = float((grid[-1] / grid[0]) ** 0.5)
    holds = bool(growth >= required)

    certificate = Certificate(
        kind=CertificateKind.SURJECTIVITY,
        holds=holds,
        witnesses={
            "table": table,
            "max_ratio": float(ratios[peak]),
            "argmax_R": float(grid[peak]),
            "growth_factor": growth,
            "required_growth": required,
            "heuristic": SURJECTIVITY_LABEL,
        },
        inputs_digest=inputs_digest(
            problem=problem.name, u0=u0, R_grid=grid, sample_count=int(sample_count), seed=int(seed),
        ),
    )
    logger.log_certificate(certificate.kind.value, holds, max_ratio=float(ratios[peak]),
                           growth_factor=growth)
    return certificate


def hadamard_constants(bounds: HadamardBounds, u0_norm: float, g0: float) -> HadamardConstants:
    """
    Constants of the Hadamard-type bound ||[F'(u)]^{-1}|| <= a||u|| + b

    p = b/a, c1 = (||u0|| + p) e^{a g0} - p, c2 = (a c1 + b) g0. For a = 0 the
    velocity is bounded by b g0 e^{-t} directly: c1 = ||u0||, c2 = b g0, p = inf.
    The flow then stays in B(u0, c2).

    Raises:
        ContractViolation: a < 0, b <= 0, or negative u0_norm / g0
    """
    a, b = float(bounds.a), float(bounds.b)
    if a < 0 or b <= 0:
        raise ContractViolation(f"Hadamard bounds need a >= 0 and b > 0 (got a={a}, b={b})")
    u0_norm, g0 = float(u0_norm), float(g0)
    if u0_norm < 0 or g0 < 0:
        raise ContractViolation(f"u0_norm and g0 must be nonnegative (got {u0_norm}, {g0})")

    if a == 0:
        p, c1, c2 = math.inf, u0_norm, b * g0
    else:
        p = b / a
        c1 = (u0_norm + p) * math.exp(a * g0) - p
        c2 = (a * c1 + b) * g0

    return HadamardConstants(a=a, b=b, u0_norm=u0_norm, g0=g0, p=p, c1=c1, c2=c2)


@log_execution_time("hadamard_check")
def hadamard_check(problem: NonlinearProblem, bounds: HadamardBounds, ball: Ball,
                   sample_count: int, seed: int) -> Certificate:
    """
    Sampled check of ||[F'(u)]^{-1}|| <= a||u|| + b over a ball

    Uses the sample points of estimate_m. holds iff the worst ratio
    ||[F'(u)]^{-1}|| / (a||u|| + b) is at most 1.
    """
    validate_sampling(problem, ball, sample_count, seed)

    worst_ratio, witness = -math.inf, ball.center
    for u in iter_estimation_points(ball, int(sample_count), int(seed)):
        inv_norm, _ = jacobian_extremes(problem, u)
        ratio = inv_norm / (bounds.a * float(np.linalg.norm(u)) + bounds.b)
        if ratio > worst_ratio:
            worst_ratio, witness = ratio, u

    holds = bool(worst_ratio <= 1.0)
    certificate = Certificate(
        kind=CertificateKind.HADAMARD,
        holds=holds,
        witnesses={
            "worst_ratio": worst_ratio,
            "witness": witness.tolist(),
            "a": bounds.a,
            "b": bounds.b,
            "sample_count": int(sample_count),
        },
        inputs_digest=inputs_digest(
            problem=problem.name, a=bounds.a, b=bounds.b, ball=ball.to_dict(),
            sample_count=int(sample_count), seed=int(seed),
        ),
    )
    logger.log_certificate(certificate.kind.value, holds, worst_ratio=worst_ratio)
    return certificate


def _displacements(trajectory: Trajectory, reference: np.ndarray) -> np.ndarray:
    return np.linalg.norm(trajectory.states - reference, axis=1)


def _bound_check(lhs: np.ndarray, rhs: np.ndarray, atol: float) -> BoundCheck:
    excess = lhs - rhs
    max_violation = max(float(np.max(excess)), 0.0) if excess.size else 0.0
    return BoundCheck(max_violation, bool(np.all(excess <= atol)))


def verify_convergence_bound(trajectory: Trajectory, m_hat: float, slack: float,
                             atol: float = 1e-12) -> BoundCheck:
    """
    Convergence envelope ||u(t) - u(inf)|| <= m_hat g(0) e^{-t} (1 + slack)

    u(inf) is approximated by the last trajectory state; atol absorbs the
    round-off in differences of nearly equal states.

    Raises:
        ContractViolation: trajectory did not end Converged
    """
    if trajectory.status is not SolveStatus.CONVERGED:
        raise ContractViolation(
            f"convergence envelope needs a Converged trajectory (status {trajectory.status})"
        )
    lhs = _displacements(trajectory, trajectory.points[-1].u)
    rhs = float(m_hat) * trajectory.g0 * np.exp(-trajectory.times) * (1.0 + float(slack))
    return _bound_check(lhs, rhs, atol)


def check_velocity_bound(trajectory: Trajectory, m_hat: float, R: float, eps: float = 1e-6,
                         atol: float = 1e-12) -> BoundCheck:
    """Velocity bound ||u'(t)|| <= m_hat g(0) e^{-t} (1 + eps) at points inside B(u0, R)"""
    inside = _displacements(trajectory, trajectory.u0) <= float(R)
    lhs = trajectory.velocity_norms[inside]
    rhs = float(m_hat) * trajectory.g0 * np.exp(-trajectory.times[inside]) * (1.0 + eps)
    return _bound_check(lhs, rhs, atol)


def check_trap_containment(trajectory: Trajectory, m_hat: float, g0: float, R: float,
                           atol: float = 1e-8) -> BoundCheck:
    """||u(t) - u0|| <= min(R, m_hat g0 (1 - e^{-t})) + atol at every point"""
    lhs = _displacements(trajectory, trajectory.u0)
    envelope = float(m_hat) * float(g0) * -np.expm1(-trajectory.times)
    return _bound_check(lhs, np.minimum(float(R), envelope), atol)


def check_hadamard_ball(trajectory: Trajectory, constants: HadamardConstants, rtol: float = 1e-6,
                        atol: float = 1e-12) -> BoundCheck:
    """||u(t) - u0|| <= c2 (1 - e^{-t}) (1 + rtol), so the flow stays in B(u0, c2)"""
    lhs = _displacements(trajectory, trajectory.u0)
    rhs = constants.c2 * -np.expm1(-trajectory.times) * (1.0 + rtol)
    return _bound_check(lhs, rhs, atol)


__all__ = [
    'trap_ball_check',
    'surjectivity_scan',
    'hadamard_constants',
    'hadamard_check',
    'verify_convergence_bound',
    'check_velocity_bound',
    'check_trap_containment',
    'check_hadamard_ball',
    'SURJECTIVITY_LABEL',
]
