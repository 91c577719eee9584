"""
Embedded Runge-Kutta integration
================================

Dormand-Prince 5(4) pair (DOPRI5): seven stages, 5th order propagation with an
embedded 4th order error estimate and the FSAL property (the last stage is
the derivative at the new state and seeds the next step).

Step sizes follow a PI controller on the RMS error norm
``err = sqrt(mean((e_i / (atol + rtol * max(|y_i|, |y_new_i|)))^2))``.
"""

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from ..core.problem import Vector

# Butcher tableau
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B_HAT = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B - B_HAT

ORDER = 5


class DormandPrince54:
    """Single-step DOPRI5 for autonomous systems y' = rhs(y)."""

    stages = 7

    def __init__(self, rhs: Callable[[Vector], Vector]):
        self.rhs = rhs
        self.evaluations = 0

    def step(self, y: Vector, h: float, k1: Vector) -> Tuple[Vector, Vector, Vector]:
        """
        Advance one step

        Args:
            y: Current state
            h: Step size
            k1: rhs(y), reused from the previous step

        Returns:
            (y_new, local error estimate, rhs(y_new))
        """
        k = np.empty((self.stages, y.size))
        k[0] = k1
        for i in range(1, self.stages - 1):
            k[i] = self.rhs(y + h * (np.asarray(A[i]) @ k[:i]))
            self.evaluations += 1

        y_new = y + h * (B[:6] @ k[:6])
        k[6] = self.rhs(y_new)
        self.evaluations += 1

        return y_new, h * (E @ k), k[6]


def error_norm(error: Vector, y: Vector, y_new: Vector, rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((error / scale) ** 2)))


@dataclass
class PIStepController:
    """
    Proportional-integral step-size control

    On acceptance the factor is ``safety * err^-alpha * err_prev^beta``;
    on rejection it is ``safety * err^(-1/q)`` and never grows.
    """

    safety: float = 0.9
    beta: float = 0.04
    min_factor: float = 0.2
    max_factor: float = 10.0
    err_prev: float = 1e-4

    @property
    def alpha(self) -> float:
        return 1.0 / ORDER - 0.75 * self.beta

    def accept(self, err: float) -> float:
        err = max(err, 1e-10)
        factor = self.safety * err ** -self.alpha * self.err_prev ** self.beta
        self.err_prev = err
        return float(np.clip(factor, self.min_factor, self.max_factor))

    def reject(self, err: float) -> float:
        factor = self.safety * err ** (-1.0 / ORDER)
        return float(np.clip(factor, self.min_factor, 1.0))


__all__ = [
    'DormandPrince54',
    'PIStepController',
    'error_norm',
]
