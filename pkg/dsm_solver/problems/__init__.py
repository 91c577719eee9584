"""
DSM Solver Problem Suite
Registry of built-in benchmark maps with known roots and bounds
"""

from .registry import (
    PROBLEMS,
    ProblemDescriptor,
    build_problem,
    get_descriptor,
    registry_list,
)

__all__ = [
    "PROBLEMS",
    "ProblemDescriptor",
    "registry_list",
    "get_descriptor",
    "build_problem",
]
