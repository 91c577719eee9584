"""
Homotopy injectivity sweep
==========================

Flows the DSM from every node of the segment w(s) = (1 - s) u_start + s v_end
toward the same right-hand side f. If every node converges and all limits
coincide, the sampled path gives no evidence against injectivity; a false
verdict may also mean the node grid is too coarse.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np
from numpy.typing import ArrayLike
from scipy.spatial.distance import pdist

from ..core.problem import NonlinearProblem, Vector
from ..core.validators import ContractViolation, as_vector, validate_dimension, validate_positive
from ..flow.newton_flow import solve_dsm
from ..logging_config import get_logger, log_execution_time
from ..models import FlowConfig, HomotopyResult, NodeLimit, PathSpec, SolveResult, SolveStatus

logger = get_logger("dsm_solver.homotopy")

DEFAULT_COINCIDENCE_TOL = 1e-7


def segment_path(path: PathSpec, s: float) -> Vector:
    """
    w(s) = (1 - s) u_start + s v_end

    The endpoints are returned exactly at s = 0 and s = 1.

    Raises:
        ContractViolation: s outside [0, 1]
    """
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ContractViolation(f"path parameter s must lie in [0, 1] (got {s!r})")
    if s == 0.0:
        return path.u_start.copy()
    if s == 1.0:
        return path.v_end.copy()
    return (1.0 - s) * path.u_start + s * path.v_end


def _first_failure(limits: List[NodeLimit], coincidence_tol: float) -> Optional[int]:
    for index, limit in enumerate(limits):
        if limit.status is not SolveStatus.CONVERGED:
            return index
    for index in range(1, len(limits)):
        earlier = np.array([l.u_limit for l in limits[:index]])
        if np.max(np.linalg.norm(earlier - limits[index].u_limit, axis=1)) > coincidence_tol:
            return index
    return None


@log_execution_time("injectivity_sweep")
def injectivity_sweep(problem: NonlinearProblem, path: PathSpec, f: ArrayLike,
                      config: Optional[FlowConfig] = None,
                      coincidence_tol: float = DEFAULT_COINCIDENCE_TOL,
                      keep_traces: bool = False, max_workers: int = 1) -> HomotopyResult:
    """
    Solve from every path node and compare the limits

    Args:
        problem: The map F
        path: Path endpoints and node count
        f: Right-hand side shared by every node
        config: Flow parameters for each solve
        coincidence_tol: Largest pairwise limit distance still counted as one limit
        keep_traces: Attach each node's trajectory to the result
        max_workers: Node solves run on this many threads; results keep node order

    Returns:
        HomotopyResult; first_failure indexes the first node that did not
        converge, or else the first whose limit is farther than
        coincidence_tol from an earlier limit
    """
    config = config or FlowConfig()
    f = as_vector(f, "f")
    validate_dimension(f, problem.dimension, "f")
    validate_dimension(path.u_start, problem.dimension, "u_start")
    coincidence_tol = validate_positive(coincidence_tol, "coincidence_tol")

    nodes = path.nodes()

    def solve_node(s: float) -> SolveResult:
        return solve_dsm(problem, segment_path(path, s), f, config)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(solve_node, nodes))
    else:
        results = [solve_node(s) for s in nodes]

    limits = []
    for s, result in zip(nodes, results):
        logger.log_sweep_node(float(s), result.status.value, result.g_final)
        limits.append(NodeLimit(float(s), result.u_final, result.status, result.g_final))

    converged = [limit.u_limit for limit in limits if limit.status is SolveStatus.CONVERGED]
    spread = float(np.max(pdist(np.array(converged)))) if len(converged) > 1 else 0.0
    all_converged = len(converged) == len(limits)
    verdict = all_converged and spread <= coincidence_tol

    first_failure = _first_failure(limits, coincidence_tol) if not verdict else None

    logger.info("Injectivity sweep finished", problem=problem.name, nodes=len(limits),
                verdict=verdict, max_limit_spread=spread, first_failure=first_failure)

    return HomotopyResult(
        limits=limits,
        injective_verdict=verdict,
        max_limit_spread=spread,
        coincidence_tol=coincidence_tol,
        first_failure=first_failure,
        per_node_traces=[r.trajectory for r in results] if keep_traces else None,
    )


__all__ = [
    'segment_path',
    'injectivity_sweep',
    'DEFAULT_COINCIDENCE_TOL',
]
