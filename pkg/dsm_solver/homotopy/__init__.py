"""
DSM Solver Homotopy
Injectivity sweeps along a segment path and the perturbed-start stability check
"""

from .stability import stability_check
from .sweep import injectivity_sweep, segment_path

__all__ = [
    "segment_path",
    "injectivity_sweep",
    "stability_check",
]
