"""
Pydantic and dataclass models for the DSM solver.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Literal, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.interpolate import CubicHermiteSpline

from .config import DSMSettings
from .core.problem import Ball, Vector
from .core.utils import to_jsonable
from .core.validators import ContractViolation, as_vector

# --- Flow configuration ---

class FlowConfig(BaseModel):
    """Integrator and stopping parameters for one Newton-flow solve."""

    model_config = ConfigDict(frozen=True)

    residual_tol: float = Field(1e-10, gt=0, description="Stop with Converged once g <= residual_tol.")
    t_max: float = Field(40.0, gt=0, description="Flow-time horizon.")
    rk_rel_tol: float = Field(1e-10, gt=0)
    rk_abs_tol: float = Field(1e-12, gt=0)
    max_step: float = Field(0.1, gt=0)
    min_step: float = Field(1e-12, gt=0)
    initial_step: float = Field(1e-2, gt=0)
    safety: float = Field(0.9, gt=0, lt=1)
    max_steps: int = Field(200_000, gt=0)
    escape_radius: Optional[float] = Field(None, ge=0, description="Abort once ||u - u0|| exceeds it.")

    @model_validator(mode="after")
    def _check_step_bounds(self) -> "FlowConfig":
        if self.min_step > self.max_step:
            raise ValueError(f"min_step ({self.min_step}) exceeds max_step ({self.max_step})")
        return self

    @classmethod
    def from_settings(cls, settings: DSMSettings, **overrides: Any) -> "FlowConfig":
        values = settings.get_flow_defaults()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


# --- Trajectories ---

class SolveStatus(str, Enum):
    CONVERGED = "Converged"
    ESCAPED_BALL = "EscapedBall"
    HORIZON_REACHED = "HorizonReached"
    SINGULAR_JACOBIAN = "SingularJacobian"


@dataclass(frozen=True)
class TrajectoryPoint:
    """One recorded flow state; step_accepted is False only for the initial condition."""
    t: float
    u: Vector
    g: float
    velocity_norm: float
    step_accepted: bool
    velocity: Optional[Vector] = field(default=None, repr=False, compare=False)


@dataclass
class Trajectory:
    """Time-ordered flow states with step diagnostics."""
    points: List[TrajectoryPoint] = field(default_factory=list)
    status: Optional[SolveStatus] = None
    rejected_steps: int = 0

    def __len__(self) -> int:
        return len(self.points)

    def append(self, point: TrajectoryPoint) -> None:
        if self.points and point.t < self.points[-1].t:
            raise ContractViolation("trajectory times must be nondecreasing")
        self.points.append(point)

    @property
    def times(self) -> Vector:
        return np.array([p.t for p in self.points])

    @property
    def residuals(self) -> Vector:
        return np.array([p.g for p in self.points])

    @property
    def velocity_norms(self) -> Vector:
        return np.array([p.velocity_norm for p in self.points])

    @property
    def states(self) -> np.ndarray:
        return np.array([p.u for p in self.points])

    @property
    def u0(self) -> Vector:
        return self.points[0].u

    @property
    def g0(self) -> float:
        return self.points[0].g

    @property
    def accepted_steps(self) -> int:
        return sum(1 for p in self.points if p.step_accepted)

    def interpolate(self, times: Any) -> np.ndarray:
        """Cubic Hermite dense output from stored states and velocities"""
        if len(self.points) < 2 or any(p.velocity is None for p in self.points):
            raise ContractViolation("dense output needs at least two points with stored velocities")
        spline = CubicHermiteSpline(
            self.times,
            self.states,
            np.array([p.velocity for p in self.points]),
            axis=0,
        )
        return spline(np.asarray(times, dtype=float))

    def to_records(self) -> List[Dict[str, Any]]:
        """Rows with the trace fields t, g, velocity_norm, u_0..u_{n-1}"""
        rows = []
        for p in self.points:
            row: Dict[str, Any] = {"t": p.t, "g": p.g, "velocity_norm": p.velocity_norm}
            row.update({f"u_{i}": float(x) for i, x in enumerate(p.u)})
            rows.append(row)
        return rows


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    trajectory: Trajectory
    u_final: Vector
    g_final: float

    @property
    def steps(self) -> int:
        return self.trajectory.accepted_steps

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "u_final": self.u_final.tolist(),
            "g_final": self.g_final,
            "steps": self.steps,
            "rejected_steps": self.trajectory.rejected_steps,
            "t_final": self.trajectory.points[-1].t,
        }


class ResidualLawCheck(NamedTuple):
    slope: float
    max_deviation: float
    passed: bool


class BoundCheck(NamedTuple):
    max_violation: float
    passed: bool


# --- Certificates ---

@dataclass(frozen=True)
class ConditionEstimate:
    """Sampled bounds m(R), M1(R) and optionally M2(R) over a ball; lower bounds on the true suprema."""
    ball: Ball
    m_hat: float
    M1_hat: float
    sample_count: int
    witness_m: Vector
    witness_M1: Vector
    seed: int
    grid_points: int = 0
    M2_hat: Optional[float] = None
    witness_M2: Optional[Vector] = None
    empirical: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            "ball": self.ball.to_dict(),
            "m_hat": self.m_hat,
            "M1_hat": self.M1_hat,
            "M2_hat": self.M2_hat,
            "sample_count": self.sample_count,
            "grid_points": self.grid_points,
            "seed": self.seed,
            "witness_m": self.witness_m,
            "witness_M1": self.witness_M1,
            "witness_M2": self.witness_M2,
            "empirical": self.empirical,
        })


class HadamardBounds(BaseModel):
    """Growth bound ||[F'(u)]^{-1}|| <= a||u|| + b."""
    model_config = ConfigDict(frozen=True)

    a: float = Field(..., ge=0)
    b: float = Field(..., gt=0)


class HadamardConstants(BaseModel):
    """p = b/a, c1 = (||u0|| + p) e^{a g0} - p, c2 = (a c1 + b) g0; a = 0 gives c1 = ||u0||, c2 = b g0."""
    model_config = ConfigDict(frozen=True)

    a: float
    b: float
    u0_norm: float
    g0: float
    p: float
    c1: float
    c2: float

    def recheck(self, rel_tol: float = 1e-12) -> bool:
        """Re-derive c1 and c2 from the stored inputs"""
        if self.a == 0:
            c1, c2 = self.u0_norm, self.b * self.g0
        else:
            p = self.b / self.a
            c1 = (self.u0_norm + p) * math.exp(self.a * self.g0) - p
            c2 = (self.a * c1 + self.b) * self.g0
        return (math.isclose(c1, self.c1, rel_tol=rel_tol, abs_tol=1e-300)
                and math.isclose(c2, self.c2, rel_tol=rel_tol, abs_tol=1e-300))


class CertificateKind(str, Enum):
    TRAP_BALL = "TrapBall"
    SURJECTIVITY = "Surjectivity"
    HADAMARD = "Hadamard"


class Certificate(BaseModel):
    """Outcome of a condition check with the witnesses needed to reproduce it."""
    model_config = ConfigDict(frozen=True)

    kind: CertificateKind
    holds: bool
    empirical: bool = True
    witnesses: Dict[str, Any] = Field(default_factory=dict)
    inputs_digest: Dict[str, Any] = Field(default_factory=dict)

    def reproduce(self) -> bool:
        """Recompute the verdict from witnesses alone"""
        w = self.witnesses
        if self.kind is CertificateKind.TRAP_BALL:
            m_hat = float(w["m_hat"])
            return math.isfinite(m_hat) and m_hat * float(w["g0"]) <= float(w["R"])
        if self.kind is CertificateKind.SURJECTIVITY:
            return float(w["growth_factor"]) >= float(w["required_growth"])
        return float(w["worst_ratio"]) <= 1.0

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            "kind": self.kind.value,
            "holds": self.holds,
            "empirical": self.empirical,
            "witnesses": self.witnesses,
            "inputs_digest": self.inputs_digest,
        })


# --- Homotopy ---

@dataclass(frozen=True)
class PathSpec:
    """Segment w(s) = (1 - s) u_start + s v_end sampled at node_count uniform nodes."""
    u_start: Vector
    v_end: Vector
    node_count: int = 11

    def __post_init__(self):
        u = as_vector(self.u_start, "u_start")
        v = as_vector(self.v_end, "v_end")
        if u.shape != v.shape:
            raise ContractViolation(f"path endpoints differ in dimension ({u.size} vs {v.size})")
        if int(self.node_count) < 2:
            raise ContractViolation(f"node_count must be >= 2 (got {self.node_count})")
        object.__setattr__(self, "u_start", u)
        object.__setattr__(self, "v_end", v)
        object.__setattr__(self, "node_count", int(self.node_count))

    @property
    def sigma(self) -> float:
        return 1.0 / (self.node_count - 1)

    def nodes(self) -> Vector:
        return np.linspace(0.0, 1.0, self.node_count)


@dataclass(frozen=True)
class NodeLimit:
    s: float
    u_limit: Vector
    status: SolveStatus
    g_final: float

    def to_dict(self) -> Dict[str, Any]:
        return {"s": self.s, "status": self.status.value,
                "u_limit": self.u_limit.tolist(), "g_final": self.g_final}


@dataclass(frozen=True)
class HomotopyResult:
    limits: List[NodeLimit]
    injective_verdict: bool
    max_limit_spread: float
    coincidence_tol: float
    first_failure: Optional[int] = None
    per_node_traces: Optional[List[Trajectory]] = field(default=None, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nodes": [limit.to_dict() for limit in self.limits],
            "verdict": self.injective_verdict,
            "max_limit_spread": self.max_limit_spread,
            "coincidence_tol": self.coincidence_tol,
            "first_failure": self.first_failure,
        }


@dataclass(frozen=True)
class StabilityReport:
    """Separation eta(t) of two flows started delta apart."""
    sup_ratio: float
    decay_c3: float
    passed: bool
    applicable: bool = True
    c_max: float = 100.0
    statuses: tuple = ()
    grid_times: Optional[Vector] = field(default=None, repr=False)
    grid_eta: Optional[Vector] = field(default=None, repr=False)
    limits: tuple = field(default=(), repr=False)

    def __iter__(self):
        # unpacks as (sup_ratio, decay_c3, pass)
        return iter((self.sup_ratio, self.decay_c3, self.passed))

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            "sup_ratio": self.sup_ratio,
            "decay_c3": self.decay_c3,
            "pass": self.passed,
            "applicable": self.applicable,
            "c_max": self.c_max,
            "statuses": [s.value for s in self.statuses],
            "grid": None if self.grid_times is None else {
                "t": self.grid_times, "eta": self.grid_eta,
            },
        })


# --- CLI ---

class RunManifest(BaseModel):
    """Everything needed to reproduce one CLI run."""
    subcommand: Literal["solve", "certify", "scan", "homotopy", "problems"]
    problem: Optional[str] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)
    seed: int
    outputs: Dict[str, Optional[str]] = Field(default_factory=dict)
    tool_version: str


__all__ = [
    'FlowConfig',
    'SolveStatus',
    'TrajectoryPoint',
    'Trajectory',
    'SolveResult',
    'ResidualLawCheck',
    'BoundCheck',
    'ConditionEstimate',
    'HadamardBounds',
    'HadamardConstants',
    'CertificateKind',
    'Certificate',
    'PathSpec',
    'NodeLimit',
    'HomotopyResult',
    'StabilityReport',
    'RunManifest',
]
