"""
DSM Solver Configuration
========================

Settings management for the dynamical-systems-method solver.

Provides:
- Environment-based configuration (``DSM_*`` variables, optional ``.env``)
- Integrator defaults (tolerances, step bounds, horizon)
- Certificate sampling and homotopy defaults
- Logging configuration
"""

from enum import Enum
from typing import Any, Dict, List

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LogLevel(str, Enum):
    """Logging levels"""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class LogFormat(str, Enum):
    """Log renderers"""
    CONSOLE = "console"
    JSON = "json"


class DSMSettings(BaseSettings):
    """
    DSM solver settings

    Reads configuration from ``DSM_``-prefixed environment variables with
    fallback defaults. ``DSM_SEED`` sets the default sampling seed.
    """

    model_config = SettingsConfigDict(
        env_prefix="DSM_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Basic service configuration
    service_name: str = Field(default="dsm-solver")
    version: str = Field(default="1.0.0")

    # Reproducibility
    seed: int = Field(default=7)

    # Newton flow integration
    residual_tol: float = Field(default=1e-10, gt=0)
    t_max: float = Field(default=40.0, gt=0)
    rk_rel_tol: float = Field(default=1e-10, gt=0)
    rk_abs_tol: float = Field(default=1e-12, gt=0)
    max_step: float = Field(default=0.1, gt=0)
    min_step: float = Field(default=1e-12, gt=0)
    initial_step: float = Field(default=1e-2, gt=0)
    safety: float = Field(default=0.9, gt=0, lt=1)
    max_steps: int = Field(default=200_000, gt=0)

    # Jacobian fallback
    fd_step: float = Field(default=1e-6, gt=0)

    # Certificates
    certify_samples: int = Field(default=2000, ge=1)

    # Homotopy sweeps
    homotopy_nodes: int = Field(default=11, ge=2)
    coincidence_tol: float = Field(default=1e-7, gt=0)
    # per-node escape radius when --escape-radius is not given
    homotopy_escape_radius: float = Field(default=10.0, gt=0)
    stability_c_max: float = Field(default=100.0, gt=0)
    max_workers: int = Field(default=1, ge=1)

    # Logging configuration
    log_level: LogLevel = Field(default=LogLevel.WARNING)
    log_format: LogFormat = Field(default=LogFormat.CONSOLE)

    def get_flow_defaults(self) -> Dict[str, Any]:
        """Get integrator defaults as FlowConfig keyword arguments"""
        return {
            "residual_tol": self.residual_tol,
            "t_max": self.t_max,
            "rk_rel_tol": self.rk_rel_tol,
            "rk_abs_tol": self.rk_abs_tol,
            "max_step": self.max_step,
            "min_step": self.min_step,
            "initial_step": self.initial_step,
            "safety": self.safety,
            "max_steps": self.max_steps,
        }

    def get_logging_config(self) -> Dict[str, Any]:
        """Get logging configuration"""
        return {
            "service_name": self.service_name,
            "log_level": self.log_level.value,
            "format_type": self.log_format.value,
        }


# Create global settings instance
settings = DSMSettings()


def validate_settings(current: DSMSettings = None) -> List[str]:
    """Validate settings and report combinations that defeat the solver's checks"""
    current = current or settings
    issues = []

    if current.min_step > current.max_step:
        issues.append("DSM_MIN_STEP must not exceed DSM_MAX_STEP")

    if current.initial_step < current.min_step:
        issues.append("DSM_INITIAL_STEP is below DSM_MIN_STEP and will be raised to it")

    if current.rk_rel_tol > 1e-6:
        issues.append("DSM_RK_REL_TOL above 1e-6 blurs the exponential residual law")

    if current.residual_tol < 1e-14:
        issues.append("DSM_RESIDUAL_TOL below 1e-14 is under double-precision round-off for most problems")

    return issues


__all__ = [
    'DSMSettings',
    'settings',
    'LogLevel',
    'LogFormat',
    'validate_settings',
]
