"""
Built-in problem suite
======================

Benchmark maps with known analytic structure. Each descriptor carries a
ground-truth root with its right-hand side, the formula for m(R) where one is
known, Hadamard constants (a, b) where the growth bound holds, and tags:

- surjective / homeomorphism: F is onto / a global homeomorphism of R^n
- counterexample: F'(u) is invertible everywhere yet F(u) = f has no solution
  for some f (e^u = 0)

Provides:
- ProblemDescriptor, registry_list, get_descriptor, build_problem

Used by:
- cli (every subcommand resolves --problem here)
- test_problem_suite and the acceptance tests
"""

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Dict, FrozenSet, List, Optional

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import brentq, root

from ..core.problem import DEFAULT_FD_STEP, Ball, NonlinearProblem, Vector
from ..core.validators import (
    ContractViolation,
    UnknownProblemError,
    as_vector,
    validate_dimension,
    validate_positive,
)
from ..models import HadamardBounds
from . import functions

SURJECTIVE = "surjective"
HOMEOMORPHISM = "homeomorphism"
COUNTEREXAMPLE = "counterexample"

# bracket solves land within a few ulps of the root
BRENTQ_XTOL = 1e-15
BRENTQ_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class ProblemDescriptor:
    """Registry entry: how to build a problem and what is known about it."""

    name: str
    dimension: Optional[int]
    description: str
    func: Callable[[Vector], Vector]
    jac: Callable[[Vector], Vector]
    tags: FrozenSet[str] = frozenset()
    known_m_formula: Optional[str] = None
    m_closure: Optional[Callable[[float, Vector], float]] = field(default=None, repr=False)
    hadamard: Optional[HadamardBounds] = None
    reference_f: Optional[Vector] = None
    known_root: Optional[Vector] = None
    root_solver: Optional[Callable[[Vector], Optional[Vector]]] = field(default=None, repr=False)
    valid_ball: Optional[Ball] = None

    def build(self, dimension: Optional[int] = None, fd_step: float = DEFAULT_FD_STEP) -> NonlinearProblem:
        """
        Instantiate the map

        Problems of arbitrary dimension default to n = 1. fd_step is the base
        central-difference step used when a Jacobian is not analytic.

        Raises:
            ContractViolation: dimension differs from a fixed problem dimension
        """
        if self.dimension is None:
            n = 1 if dimension is None else int(dimension)
        else:
            n = self.dimension
            if dimension is not None and int(dimension) != n:
                raise ContractViolation(f"{self.name} has fixed dimension {n} (got {dimension})")
        return NonlinearProblem(name=self.name, dimension=n, func=self.func, jac=self.jac,
                                description=self.description, fd_step=validate_positive(fd_step, "fd_step"))

    def root_for(self, f: ArrayLike) -> Optional[Vector]:
        """Oracle root of F(u) = f, None when no solution is known to exist"""
        if self.root_solver is None:
            return None
        f = as_vector(f, "f")
        if self.dimension is not None:
            validate_dimension(f, self.dimension, "f")
        return self.root_solver(f)

    def m_formula(self, R: float, center: ArrayLike) -> Optional[float]:
        """Closed-form m(R) on B(center, R), None when not known"""
        if self.m_closure is None:
            return None
        return float(self.m_closure(float(R), as_vector(center, "center")))

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "description": self.description,
            "tags": sorted(self.tags),
            "known_m_formula": self.known_m_formula,
            "hadamard": None if self.hadamard is None else self.hadamard.model_dump(),
            "reference_f": None if self.reference_f is None else self.reference_f.tolist(),
            "known_root": None if self.known_root is None else self.known_root.tolist(),
            "valid_ball": None if self.valid_ball is None else self.valid_ball.to_dict(),
        }


def _componentwise_brentq(residual: Callable[[float, float], float],
                          bracket: Callable[[float], tuple]) -> Callable[[Vector], Vector]:
    def solve(f: Vector) -> Vector:
        return np.array([
            brentq(residual, *bracket(fi), args=(fi,), xtol=BRENTQ_XTOL, rtol=BRENTQ_RTOL)
            for fi in f
        ])
    return solve


def _exp_root(f: Vector) -> Optional[Vector]:
    if np.any(f <= 0):
        return None
    return np.log(f)


def _cubic_m(R: float, center: Vector) -> float:
    # sigma_min = min_i (1 + 3 u_i^2), smallest where some |u_i| is smallest on the ball
    distance = max(0.0, float(np.min(np.abs(center))) - R)
    return 1.0 / (1.0 + 3.0 * distance**2)


COUPLED_BALL = Ball(center=np.zeros(2), radius=0.8)


def _coupled_root(f: Vector) -> Optional[Vector]:
    # only roots inside the ball where F' is known to be nonsingular count
    solution = root(lambda u: functions.coupled_2d(u) - f, x0=np.zeros(2),
                    jac=functions.coupled_2d_jacobian, method="hybr", tol=1e-15)
    if not solution.success or not COUPLED_BALL.contains(solution.x):
        return None
    return solution.x


def _build_registry() -> Dict[str, ProblemDescriptor]:
    descriptors = [
        ProblemDescriptor(
            name="identity",
            dimension=None,
            description="F(u) = u in any dimension",
            func=functions.identity,
            jac=functions.identity_jacobian,
            tags=frozenset({SURJECTIVE, HOMEOMORPHISM}),
            known_m_formula="m(R) = 1",
            m_closure=lambda R, center: 1.0,
            hadamard=HadamardBounds(a=0.0, b=1.0),
            reference_f=np.array([7.0]),
            known_root=np.array([7.0]),
            root_solver=lambda f: f.copy(),
        ),
        ProblemDescriptor(
            name="linear_spd",
            dimension=2,
            description="F(u) = A u with A = [[2, 1], [1, 2]] (eigenvalues 1 and 3)",
            func=functions.linear_spd,
            jac=functions.linear_spd_jacobian,
            tags=frozenset({SURJECTIVE, HOMEOMORPHISM}),
            known_m_formula="m(R) = 1 (smallest eigenvalue of A is 1)",
            m_closure=lambda R, center: 1.0,
            hadamard=HadamardBounds(a=0.0, b=1.0),
            reference_f=np.array([3.0, 3.0]),
            known_root=np.array([1.0, 1.0]),
            root_solver=lambda f: np.linalg.solve(functions.SPD_MATRIX, f),
        ),
        ProblemDescriptor(
            name="scalar_exp",
            dimension=1,
            description="F(u) = e^u; F' never vanishes but e^u = 0 has no solution",
            func=functions.scalar_exp,
            jac=functions.scalar_exp_jacobian,
            tags=frozenset({COUNTEREXAMPLE}),
            known_m_formula="m(R) = e^(R - c) on B(c, R); e^R at center 0",
            m_closure=lambda R, center: math.exp(R - float(center[0])),
            reference_f=np.array([1.0]),
            known_root=np.array([0.0]),
            root_solver=_exp_root,
        ),
        ProblemDescriptor(
            name="monotone_cubic",
            dimension=None,
            description="F(u) = u + u^3 componentwise; F' >= I",
            func=functions.monotone_cubic,
            jac=functions.monotone_cubic_jacobian,
            tags=frozenset({SURJECTIVE, HOMEOMORPHISM}),
            known_m_formula="m(R) = 1 / (1 + 3 d^2), d = max(0, min_i |c_i| - R); 1 when the ball meets a coordinate hyperplane",
            m_closure=_cubic_m,
            hadamard=HadamardBounds(a=0.0, b=1.0),
            reference_f=np.array([2.0]),
            known_root=np.array([1.0]),
            root_solver=_componentwise_brentq(
                lambda u, fi: u + u**3 - fi,
                lambda fi: (-abs(fi) - 1.0, abs(fi) + 1.0),
            ),
        ),
        ProblemDescriptor(
            name="trig_perturbed",
            dimension=None,
            description="F(u) = u + 0.5 sin(u) componentwise; F' in [0.5, 1.5]",
            func=functions.trig_perturbed,
            jac=functions.trig_perturbed_jacobian,
            tags=frozenset({SURJECTIVE, HOMEOMORPHISM}),
            known_m_formula="m(R) <= 2 on every ball",
            hadamard=HadamardBounds(a=0.0, b=2.0),
            reference_f=np.array([math.pi / 2 + 0.5]),
            known_root=np.array([math.pi / 2]),
            root_solver=_componentwise_brentq(
                lambda u, fi: u + 0.5 * math.sin(u) - fi,
                lambda fi: (fi - 0.5, fi + 0.5),
            ),
        ),
        ProblemDescriptor(
            name="coupled_2d",
            dimension=2,
            description=(
                "F(u1, u2) = (u1 + u2^3, u2 + u1^3); det F' = 1 - 9 u1^2 u2^2, "
                "nonsingular on B(0, 0.8) where |u1 u2| <= 0.32 < 1/3"
            ),
            func=functions.coupled_2d,
            jac=functions.coupled_2d_jacobian,
            reference_f=np.array([0.625, 0.625]),
            known_root=np.array([0.5, 0.5]),
            root_solver=_coupled_root,
            valid_ball=COUPLED_BALL,
        ),
    ]
    return {descriptor.name: descriptor for descriptor in descriptors}


PROBLEMS = MappingProxyType(_build_registry())


def registry_list() -> List[ProblemDescriptor]:
    """Every registered problem, in registration order"""
    return list(PROBLEMS.values())


def get_descriptor(name: str) -> ProblemDescriptor:
    """
    Look up a problem by name

    Raises:
        UnknownProblemError: name is not registered; the error lists the registry
    """
    try:
        return PROBLEMS[name]
    except KeyError:
        raise UnknownProblemError(name, list(PROBLEMS)) from None


def build_problem(name: str, dimension: Optional[int] = None,
                  fd_step: float = DEFAULT_FD_STEP) -> NonlinearProblem:
    return get_descriptor(name).build(dimension, fd_step)


__all__ = [
    'ProblemDescriptor',
    'PROBLEMS',
    'registry_list',
    'get_descriptor',
    'build_problem',
    'SURJECTIVE',
    'HOMEOMORPHISM',
    'COUNTEREXAMPLE',
]
