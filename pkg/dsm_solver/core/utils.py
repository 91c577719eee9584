"""
Utility functions for the DSM solver
Includes seeded ball sampling, spectral norms and input digests
"""

import hashlib
import json
import os
from typing import Any, Dict, Iterator, Tuple

import numpy as np

from .problem import Ball, Matrix, Vector

# sigma_min below this fraction of sigma_max counts as singular
SINGULAR_RCOND = 1e-14


def iter_ball_samples(ball: Ball, sample_count: int, seed: int) -> Iterator[Vector]:
    """
    Uniform samples in a ball, center first

    Each point is a normalized Gaussian direction scaled by radius * U^(1/n).
    Points are drawn one at a time, so the first k samples for a seed do not
    depend on sample_count.
    """
    rng = np.random.default_rng(seed)
    n = ball.dimension

    yield ball.center.copy()
    for _ in range(sample_count - 1):
        direction = random_unit_vector(rng, n)
        yield ball.center + ball.radius * rng.random() ** (1.0 / n) * direction


def interval_grid(ball: Ball, points: int = 1001) -> Vector:
    """Uniform grid across a 1-D ball, endpoints included"""
    c = float(ball.center[0])
    return np.linspace(c - ball.radius, c + ball.radius, points)


def random_unit_vector(rng: np.random.Generator, dimension: int) -> Vector:
    """Uniformly distributed direction on the unit sphere"""
    while True:
        direction = rng.standard_normal(dimension)
        norm = np.linalg.norm(direction)
        if norm > 0.0:
            return direction / norm


def singular_values(matrix: Matrix) -> Tuple[float, float]:
    """(sigma_min, sigma_max) from the full SVD"""
    s = np.linalg.svd(matrix, compute_uv=False)
    return float(s[-1]), float(s[0])


def inverse_norm(matrix: Matrix) -> float:
    """||A^{-1}|| = 1/sigma_min in the spectral norm, +inf when numerically singular"""
    sigma_min, sigma_max = singular_values(matrix)
    if sigma_max == 0.0 or sigma_min < SINGULAR_RCOND * sigma_max:
        return float("inf")
    return 1.0 / sigma_min


def spectral_norm(matrix: Matrix) -> float:
    return float(np.linalg.norm(matrix, 2))


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars and arrays (possibly nested) to plain Python values"""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def inputs_digest(**inputs: Any) -> Dict[str, Any]:
    """
    Record of the inputs behind a certificate plus a SHA-256 over their
    canonical JSON form
    """
    record = to_jsonable(inputs)
    canonical = json.dumps(record, sort_keys=True, separators=(",", ":"))
    record["sha256"] = hashlib.sha256(canonical.encode()).hexdigest()
    return record


def ensure_folder(path: str) -> str:
    """
    Ensure the parent folder of a file path exists
    Returns the absolute file path
    """
    path = os.path.abspath(path)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    return path


__all__ = [
    'SINGULAR_RCOND',
    'iter_ball_samples',
    'interval_grid',
    'random_unit_vector',
    'singular_values',
    'inverse_norm',
    'spectral_norm',
    'to_jsonable',
    'inputs_digest',
    'ensure_folder',
]
