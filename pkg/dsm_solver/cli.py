#!/usr/bin/env python3
"""
DSM Solver CLI Interface
========================
Command-line interface for the Newton-flow solver and its certificates.

Commands:
    dsm --help             Show help
    dsm solve              Integrate the flow for one problem
    dsm certify            Estimate m(R) and check the trap ball (and Hadamard bounds)
    dsm scan               Tabulate R / m(R) over a radius grid
    dsm homotopy           Sweep a segment path and compare the limits
    dsm problems           List the built-in problems

Vectors are comma-separated decimals (``--u0 1,2``); write negative leading
values as ``--u0=-1,2``. Every document goes to stdout (and to ``--output``
when given) with its run manifest; logs go to stderr.

Exit codes:
    solve     0 Converged, 2 EscapedBall, 3 HorizonReached, 4 SingularJacobian
    certify   0 trap ball holds, 2 otherwise
    scan      0
    homotopy  0 injective verdict, 2 otherwise
    any       1 usage error or unknown problem
"""

import argparse
import math
import sys
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from . import __version__
from .certificates import (
    check_hadamard_ball,
    check_trap_containment,
    check_velocity_bound,
    estimate_derivative_bounds,
    hadamard_check,
    hadamard_constants,
    surjectivity_scan,
    trap_ball_check,
    verify_convergence_bound,
)
from .config import DSMSettings
from .core.problem import Ball, NonlinearProblem, evaluate_residual
from .core.validators import ContractViolation, DSMError, UnknownProblemError, as_vector
from .export import TRACE_FORMATS, TraceExporter, render_document
from .flow import solve_dsm
from .homotopy import injectivity_sweep, stability_check
from .logging_config import LogContext, configure_structured_logging, get_logger
from .models import (
    BoundCheck,
    FlowConfig,
    HadamardBounds,
    PathSpec,
    RunManifest,
    SolveStatus,
)
from .problems import get_descriptor, registry_list

logger = get_logger("dsm_solver.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2

STATUS_EXIT_CODES = {
    SolveStatus.CONVERGED: 0,
    SolveStatus.ESCAPED_BALL: 2,
    SolveStatus.HORIZON_REACHED: 3,
    SolveStatus.SINGULAR_JACOBIAN: 4,
}


class DSMArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_vector(text: str) -> np.ndarray:
    """argparse type for comma-separated decimals"""
    try:
        return as_vector([float(item) for item in text.split(",")], "vector")
    except (ValueError, ContractViolation) as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r} ({e})")


def build_parser() -> DSMArgumentParser:
    common = DSMArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='Sampling seed (default: DSM_SEED or 7)')
    common.add_argument('--output', '-o', help='Also write the result document to this path')
    common.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                        help='Log level for stderr (default: DSM_LOG_LEVEL)')

    parser = DSMArgumentParser(
        prog='dsm',
        description='Dynamical Systems Method solver: continuous Newton flow, certificates and homotopy sweeps',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    # Solve command
    solve_parser = subparsers.add_parser('solve', parents=[common], help='Integrate the Newton flow')
    solve_parser.add_argument('--problem', required=True, help='Registered problem name')
    solve_parser.add_argument('--u0', type=parse_vector, required=True, help='Initial state')
    solve_parser.add_argument('--f', type=parse_vector, required=True, help='Right-hand side')
    solve_parser.add_argument('--tol', type=float, help='Residual tolerance (default 1e-10)')
    solve_parser.add_argument('--t-max', type=float, help='Flow-time horizon (default 40)')
    solve_parser.add_argument('--rk-rel-tol', type=float, help='Integrator relative tolerance')
    solve_parser.add_argument('--escape-radius', type=float, help='Stop once ||u - u0|| exceeds this')
    solve_parser.add_argument('--trace', help='Write the trajectory to this path')
    solve_parser.add_argument('--format', choices=TRACE_FORMATS, default='csv', help='Trace format')

    # Certify command
    certify_parser = subparsers.add_parser('certify', parents=[common],
                                           help='Estimate m(R) and check the trap ball')
    certify_parser.add_argument('--problem', required=True, help='Registered problem name')
    certify_parser.add_argument('--u0', type=parse_vector, required=True, help='Ball center and initial state')
    certify_parser.add_argument('--f', type=parse_vector, required=True, help='Right-hand side')
    certify_parser.add_argument('--R', type=float, required=True, help='Ball radius')
    certify_parser.add_argument('--samples', type=int, help='Sample count (default 2000)')
    certify_parser.add_argument('--a', type=float, help='Hadamard growth coefficient a')
    certify_parser.add_argument('--b', type=float, help='Hadamard growth offset b')

    # Scan command
    scan_parser = subparsers.add_parser('scan', parents=[common], help='Tabulate R / m(R)')
    scan_parser.add_argument('--problem', required=True, help='Registered problem name')
    scan_parser.add_argument('--u0', type=parse_vector, required=True, help='Ball center')
    scan_parser.add_argument('--R-grid', dest='R_grid', type=parse_vector, required=True,
                             help='Strictly increasing radii, e.g. 0.5,1,2,4,8')
    scan_parser.add_argument('--f', type=parse_vector, help='Also check the trap ball at every R')
    scan_parser.add_argument('--samples', type=int, help='Samples per ball (default 2000)')

    # Homotopy command
    homotopy_parser = subparsers.add_parser('homotopy', parents=[common],
                                            help='Solve along a segment path and compare limits')
    homotopy_parser.add_argument('--problem', required=True, help='Registered problem name')
    homotopy_parser.add_argument('--u0', type=parse_vector, required=True, help='Path start')
    homotopy_parser.add_argument('--v', type=parse_vector, required=True, help='Path end')
    homotopy_parser.add_argument('--f', type=parse_vector, required=True, help='Right-hand side')
    homotopy_parser.add_argument('--nodes', type=int, help='Path nodes (default 11)')
    homotopy_parser.add_argument('--coincidence-tol', type=float, help='Limit coincidence tolerance')
    homotopy_parser.add_argument('--escape-radius', type=float,
                                 help='Per-node escape radius (default: DSM_HOMOTOPY_ESCAPE_RADIUS or 10)')
    homotopy_parser.add_argument('--delta', type=float,
                                 help='Also run the stability check from u0 along the path direction')
    homotopy_parser.add_argument('--workers', type=int, help='Threads for node solves')

    # Problems command
    subparsers.add_parser('problems', parents=[common], help='List the built-in problems')

    return parser


def resolve_problem(name: str, u0: np.ndarray, current: DSMSettings) -> NonlinearProblem:
    """Build the named problem in the dimension of u0 with the configured FD step"""
    return get_descriptor(name).build(dimension=u0.size, fd_step=current.fd_step)


def make_manifest(args: argparse.Namespace, seed: int, parameters: Dict[str, Any]) -> RunManifest:
    outputs = {"document": args.output}
    if getattr(args, "trace", None) is not None:
        outputs["trace"] = args.trace
    return RunManifest(
        subcommand=args.command,
        problem=getattr(args, "problem", None),
        parameters=parameters,
        seed=seed,
        outputs=outputs,
        tool_version=__version__,
    )


def emit(document: Dict[str, Any], manifest: RunManifest, output: Optional[str]) -> None:
    """Print the document with its manifest; writing to --output happens first"""
    document = dict(document, manifest=manifest.model_dump(mode="json"))
    if output:
        TraceExporter().export_document(document, output)
    sys.stdout.write(render_document(document))


def bound_check_dict(check: Optional[BoundCheck]) -> Optional[Dict[str, Any]]:
    return None if check is None else check._asdict()


def cmd_solve(args: argparse.Namespace, current: DSMSettings, seed: int) -> int:
    """Run solve_dsm; the exit code follows the solve status"""
    problem = resolve_problem(args.problem, args.u0, current)
    config = FlowConfig.from_settings(
        current,
        residual_tol=args.tol,
        t_max=args.t_max,
        rk_rel_tol=args.rk_rel_tol,
        escape_radius=args.escape_radius,
    )
    result = solve_dsm(problem, args.u0, args.f, config)

    if args.trace:
        TraceExporter().export_trace(result.trajectory, args.trace, args.format)

    manifest = make_manifest(args, seed, {
        "u0": args.u0.tolist(),
        "f": args.f.tolist(),
        "flow": config.model_dump(),
        "format": args.format,
    })
    emit({"result": result.to_dict()}, manifest, args.output)
    return STATUS_EXIT_CODES[result.status]


def cmd_certify(args: argparse.Namespace, current: DSMSettings, seed: int) -> int:
    """Condition estimate, trap-ball certificate and the checks on the realized flow"""
    if (args.a is None) != (args.b is None):
        raise ContractViolation("--a and --b must be given together")

    problem = resolve_problem(args.problem, args.u0, current)
    samples = args.samples or current.certify_samples
    ball = Ball(args.u0, args.R)

    estimate = estimate_derivative_bounds(problem, ball, samples, seed)
    _, g0 = evaluate_residual(problem, args.u0, args.f)
    trap = trap_ball_check(estimate.m_hat, g0, args.R)
    document: Dict[str, Any] = {"estimate": estimate.to_dict(), "trap_ball": trap.to_dict()}

    constants = None
    if args.a is not None:
        bounds = HadamardBounds(a=args.a, b=args.b)
        constants = hadamard_constants(bounds, float(np.linalg.norm(args.u0)), g0)
        document["hadamard"] = {
            "constants": constants.model_dump(),
            "certificate": hadamard_check(problem, bounds, ball, samples, seed).to_dict(),
        }

    config = FlowConfig.from_settings(current, escape_radius=args.R)
    result = solve_dsm(problem, args.u0, args.f, config)
    flow: Dict[str, Any] = {"result": result.to_dict()}
    if math.isfinite(estimate.m_hat):
        trajectory = result.trajectory
        flow["velocity_bound"] = bound_check_dict(check_velocity_bound(trajectory, estimate.m_hat, args.R))
        flow["trap_containment"] = bound_check_dict(
            check_trap_containment(trajectory, estimate.m_hat, g0, args.R)
        )
        flow["convergence_envelope"] = bound_check_dict(
            verify_convergence_bound(trajectory, estimate.m_hat, 1e-6) if result.converged else None
        )
    if constants is not None:
        flow["hadamard_ball"] = bound_check_dict(check_hadamard_ball(result.trajectory, constants))
    document["flow"] = flow

    manifest = make_manifest(args, seed, {
        "u0": args.u0.tolist(),
        "f": args.f.tolist(),
        "R": args.R,
        "samples": samples,
        "a": args.a,
        "b": args.b,
        "flow": config.model_dump(),
    })
    emit(document, manifest, args.output)
    return EXIT_OK if trap.holds else EXIT_FAILED


def cmd_scan(args: argparse.Namespace, current: DSMSettings, seed: int) -> int:
    """Surjectivity scan; the verdict is reported in the document only"""
    problem = resolve_problem(args.problem, args.u0, current)
    samples = args.samples or current.certify_samples
    certificate = surjectivity_scan(problem, args.u0, args.R_grid, samples, seed)
    document: Dict[str, Any] = {"certificate": certificate.to_dict()}

    if args.f is not None:
        _, g0 = evaluate_residual(problem, args.u0, args.f)
        document["trap_ball"] = [
            trap_ball_check(row["m_hat"], g0, row["R"]).to_dict()
            for row in certificate.witnesses["table"]
        ]

    manifest = make_manifest(args, seed, {
        "u0": args.u0.tolist(),
        "R_grid": args.R_grid.tolist(),
        "f": None if args.f is None else args.f.tolist(),
        "samples": samples,
    })
    emit(document, manifest, args.output)
    return EXIT_OK


def cmd_homotopy(args: argparse.Namespace, current: DSMSettings, seed: int) -> int:
    """Injectivity sweep (and optional stability check); exit 0 iff the verdict holds"""
    problem = resolve_problem(args.problem, args.u0, current)
    path = PathSpec(args.u0, args.v, args.nodes or current.homotopy_nodes)
    escape_radius = args.escape_radius if args.escape_radius is not None else current.homotopy_escape_radius
    config = FlowConfig.from_settings(current, escape_radius=escape_radius)
    coincidence_tol = args.coincidence_tol or current.coincidence_tol

    result = injectivity_sweep(
        problem, path, args.f, config,
        coincidence_tol=coincidence_tol,
        max_workers=args.workers or current.max_workers,
    )
    document: Dict[str, Any] = {"homotopy": result.to_dict()}

    if args.delta is not None:
        direction = path.v_end - path.u_start
        length = float(np.linalg.norm(direction))
        if length == 0.0:
            raise ContractViolation("--delta needs distinct path endpoints")
        report = stability_check(problem, path.u_start, direction / length, args.delta, args.f,
                                 config, c_max=current.stability_c_max)
        document["stability"] = report.to_dict()

    manifest = make_manifest(args, seed, {
        "u0": args.u0.tolist(),
        "v": args.v.tolist(),
        "f": args.f.tolist(),
        "nodes": path.node_count,
        "coincidence_tol": coincidence_tol,
        "delta": args.delta,
        "flow": config.model_dump(),
    })
    emit(document, manifest, args.output)
    return EXIT_OK if result.injective_verdict else EXIT_FAILED


def cmd_problems(args: argparse.Namespace, current: DSMSettings, seed: int) -> int:
    """Registry metadata"""
    document = {"problems": [descriptor.to_dict() for descriptor in registry_list()]}
    emit(document, make_manifest(args, seed, {}), args.output)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, DSMSettings, int], int]] = {
    'solve': cmd_solve,
    'certify': cmd_certify,
    'scan': cmd_scan,
    'homotopy': cmd_homotopy,
    'problems': cmd_problems,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    current = DSMSettings()
    logging_config = current.get_logging_config()
    if args.log_level:
        logging_config["log_level"] = args.log_level
    configure_structured_logging(**logging_config)

    seed = args.seed if args.seed is not None else current.seed

    with LogContext(subcommand=args.command, problem=getattr(args, "problem", None)):
        try:
            return COMMANDS[args.command](args, current, seed)
        except UnknownProblemError as e:
            print(f"Error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except (ValidationError, DSMError) as e:
            logger.error("Command failed", error=e)
            print(f"Error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except KeyboardInterrupt:
            print("\nOperation cancelled by user.", file=sys.stderr)
            return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
