"""
Validators
==========
Input validation and the solver's exception hierarchy.

Provides:
- Vector coercion with finiteness checks
- Dimension, unit-vector and grid checks used as operation preconditions
- Exceptions for contract violations, evaluation failures, singular
  Jacobians and insufficient data

Used by:
- the problem model before every evaluation
- the Newton flow, certificates and homotopy modules for their preconditions
- the CLI when parsing vector arguments
"""

from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray


class DSMError(Exception):
    """Base class for solver errors"""


class ContractViolation(DSMError, ValueError):
    """An operation was called with inputs outside its contract"""


class EvaluationError(DSMError, ArithmeticError):
    """F or F' produced a non-finite value"""

    def __init__(self, message: str, component: Optional[int] = None,
                 point: Optional[NDArray[np.float64]] = None):
        super().__init__(message)
        self.component = component
        self.point = None if point is None else np.array(point, dtype=float)


class SingularJacobianError(DSMError, ArithmeticError):
    """The LU factorization of F'(u) hit a negligible pivot"""

    def __init__(self, u: NDArray[np.float64], pivot: float):
        super().__init__(f"Jacobian numerically singular at u={np.array2string(np.asarray(u))} "
                         f"(pivot {pivot:.3e})")
        self.u = np.array(u, dtype=float)
        self.pivot = float(pivot)


class InsufficientDataError(DSMError, ValueError):
    """Too few usable points for a fit"""


class UnknownProblemError(DSMError, KeyError):
    """A problem name is not registered"""

    def __init__(self, name: str, available: Sequence[str]):
        super().__init__(name)
        self.name = name
        self.available = list(available)

    def __str__(self) -> str:
        return f"unknown problem '{self.name}'; registered: {', '.join(self.available)}"


def as_vector(values: ArrayLike, name: str = "vector") -> NDArray[np.float64]:
    """
    Coerce values to a read-only 1-D float array with finite entries

    Args:
        values: Scalar or sequence of reals
        name: Label used in error messages

    Returns:
        Read-only float64 array of dimension >= 1
    """
    try:
        arr = np.array(values, dtype=float).reshape(-1)
    except (TypeError, ValueError) as e:
        raise ContractViolation(f"{name} is not a real vector: {e}") from e

    if arr.size == 0:
        raise ContractViolation(f"{name} must have dimension >= 1")

    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ContractViolation(f"{name} component {int(bad[0])} is not finite ({arr[bad[0]]})")

    arr.setflags(write=False)
    return arr


def validate_dimension(vector: NDArray[np.float64], dimension: int, name: str = "vector") -> None:
    """Raise ContractViolation unless the vector has the expected dimension"""
    if vector.shape != (dimension,):
        raise ContractViolation(
            f"{name} has dimension {vector.size}, expected {dimension}"
        )


def validate_finite(values: NDArray[np.float64], what: str,
                    point: Optional[NDArray[np.float64]] = None) -> None:
    """Raise EvaluationError naming the first non-finite component"""
    flat = np.asarray(values, dtype=float).reshape(-1)
    bad = np.flatnonzero(~np.isfinite(flat))
    if bad.size:
        index = int(bad[0])
        where = "" if point is None else f" at u={np.array2string(np.asarray(point), precision=17)}"
        raise EvaluationError(
            f"{what} component {index} is not finite ({flat[index]}){where}",
            component=index,
            point=point,
        )


def validate_unit_vector(vector: NDArray[np.float64], name: str = "direction", tol: float = 1e-12) -> None:
    """Raise ContractViolation unless the vector has unit Euclidean norm"""
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > tol:
        raise ContractViolation(f"{name} must be a unit vector (norm {norm!r})")


def validate_increasing_grid(grid: Iterable[float], name: str = "grid") -> NDArray[np.float64]:
    """Return the grid as an array after checking it is nonempty, positive and strictly increasing"""
    arr = as_vector(list(grid), name)
    if np.any(arr <= 0):
        raise ContractViolation(f"{name} entries must be positive")
    if np.any(np.diff(arr) <= 0):
        raise ContractViolation(f"{name} must be strictly increasing")
    return arr


def validate_positive(value: float, name: str) -> float:
    """Raise ContractViolation unless value is a finite positive real"""
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ContractViolation(f"{name} must be a positive real (got {value!r})")
    return value


__all__ = [
    'DSMError',
    'ContractViolation',
    'EvaluationError',
    'SingularJacobianError',
    'InsufficientDataError',
    'UnknownProblemError',
    'as_vector',
    'validate_dimension',
    'validate_finite',
    'validate_unit_vector',
    'validate_increasing_grid',
    'validate_positive',
]
