"""
Nonlinear problem model
=======================

The map F: R^n -> R^n, its residual against a right-hand side f, and the
central-difference Jacobian used when a problem supplies no analytic F'.

R^n carries the Euclidean inner product; operator norms are spectral norms.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .validators import (
    ContractViolation,
    as_vector,
    validate_dimension,
    validate_finite,
    validate_positive,
)

Vector = NDArray[np.float64]
Matrix = NDArray[np.float64]

DEFAULT_FD_STEP = 1e-6


@dataclass(frozen=True)
class NonlinearProblem:
    """
    Evaluation interface for F and F'

    ``func`` and ``jac`` must be deterministic and side-effect free. When
    ``jac`` is None the Jacobian falls back to central differences.
    """

    name: str
    dimension: int
    func: Callable[[Vector], ArrayLike]
    jac: Optional[Callable[[Vector], ArrayLike]] = None
    description: str = ""
    fd_step: float = DEFAULT_FD_STEP

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise ContractViolation(f"problem dimension must be >= 1 (got {self.dimension})")

    @property
    def has_analytic_jacobian(self) -> bool:
        return self.jac is not None

    def evaluate(self, u: ArrayLike) -> Vector:
        """F(u), checked for dimension and finiteness"""
        u = as_vector(u, "u")
        validate_dimension(u, self.dimension, "u")
        value = np.asarray(self.func(u), dtype=float).reshape(-1)
        if value.shape != (self.dimension,):
            raise ContractViolation(
                f"{self.name}: F returned dimension {value.size}, expected {self.dimension}"
            )
        validate_finite(value, f"{self.name}: F(u)", point=u)
        return value

    def jacobian(self, u: ArrayLike) -> Matrix:
        """F'(u): analytic when supplied, central differences otherwise"""
        u = as_vector(u, "u")
        validate_dimension(u, self.dimension, "u")
        if self.jac is None:
            return finite_difference_jacobian(self, u)

        matrix = np.asarray(self.jac(u), dtype=float)
        if matrix.ndim < 2:
            matrix = matrix.reshape(self.dimension, self.dimension)
        if matrix.shape != (self.dimension, self.dimension):
            raise ContractViolation(
                f"{self.name}: F' has shape {matrix.shape}, expected "
                f"({self.dimension}, {self.dimension})"
            )
        validate_finite(matrix, f"{self.name}: F'(u)", point=u)
        return matrix


@dataclass(frozen=True)
class Ball:
    """Closed ball B(center, radius) in the Euclidean norm"""

    center: Vector
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center, "ball center"))
        radius = float(self.radius)
        if not np.isfinite(radius) or radius < 0:
            raise ContractViolation(f"ball radius must be a nonnegative real (got {radius!r})")
        object.__setattr__(self, "radius", radius)

    @property
    def dimension(self) -> int:
        return int(self.center.size)

    def contains(self, u: ArrayLike, atol: float = 0.0) -> bool:
        return float(np.linalg.norm(as_vector(u) - self.center)) <= self.radius + atol

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "radius": self.radius}


def evaluate_residual(problem: NonlinearProblem, u: ArrayLike, f: ArrayLike) -> Tuple[Vector, float]:
    """
    Residual F(u) - f and its Euclidean norm g

    Args:
        problem: The map F
        u: Evaluation point
        f: Right-hand side

    Returns:
        (residual vector, g)
    """
    u = as_vector(u, "u")
    f = as_vector(f, "f")
    validate_dimension(u, problem.dimension, "u")
    validate_dimension(f, problem.dimension, "f")
    residual = problem.evaluate(u) - f
    return residual, float(np.linalg.norm(residual))


def finite_difference_jacobian(problem: NonlinearProblem, u: ArrayLike,
                               h: Optional[float] = None) -> Matrix:
    """
    Central-difference Jacobian, column j = (F(u + h e_j) - F(u - h e_j)) / 2h

    Args:
        problem: The map F
        u: Evaluation point
        h: Probe step; defaults to problem.fd_step * (1 + ||u||_inf)

    Returns:
        Dense n x n matrix
    """
    u = as_vector(u, "u")
    validate_dimension(u, problem.dimension, "u")
    if h is None:
        h = problem.fd_step * (1.0 + float(np.max(np.abs(u))))
    h = validate_positive(h, "finite-difference step h")

    n = problem.dimension
    jacobian = np.empty((n, n))
    for j in range(n):
        u_plus = u.copy()
        u_minus = u.copy()
        u_plus[j] += h
        u_minus[j] -= h
        # problem.evaluate names the probe point in its EvaluationError
        jacobian[:, j] = (problem.evaluate(u_plus) - problem.evaluate(u_minus)) / (2.0 * h)

    return jacobian


def product_problem(problem: NonlinearProblem) -> NonlinearProblem:
    """
    The map (y, z) -> (F(y), F(z)) on R^{2n} with block-diagonal Jacobian

    Integrating the product flow advances two initial conditions on one
    shared step sequence.
    """
    n = problem.dimension

    def func(w: Vector) -> Vector:
        return np.concatenate([problem.evaluate(w[:n]), problem.evaluate(w[n:])])

    def jac(w: Vector) -> Matrix:
        block = np.zeros((2 * n, 2 * n))
        block[:n, :n] = problem.jacobian(w[:n])
        block[n:, n:] = problem.jacobian(w[n:])
        return block

    return NonlinearProblem(
        name=f"{problem.name}x2",
        dimension=2 * n,
        func=func,
        jac=jac,
        description=f"two copies of {problem.name}",
        fd_step=problem.fd_step,
    )


__all__ = [
    'Vector',
    'Matrix',
    'NonlinearProblem',
    'Ball',
    'evaluate_residual',
    'finite_difference_jacobian',
    'product_problem',
    'DEFAULT_FD_STEP',
]
