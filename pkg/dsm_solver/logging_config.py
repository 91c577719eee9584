"""
Structured Logging for the DSM Solver
=====================================

Features:
- JSON formatted logs for batch runs
- Console formatted logs for interactive use
- Run context (run id, subcommand, problem) bound through contextvars
- Performance metrics for the heavy operations
- Error tracking with context

Logs are written to stderr; stdout is reserved for result documents.
"""

import logging
import sys
import time
import uuid
from contextvars import ContextVar
from functools import wraps
from typing import Any, Optional, TextIO

import structlog
from structlog.typing import EventDict


# Context variables for run correlation
run_id_ctx: ContextVar[Optional[str]] = ContextVar('run_id', default=None)
subcommand_ctx: ContextVar[Optional[str]] = ContextVar('subcommand', default=None)
problem_ctx: ContextVar[Optional[str]] = ContextVar('problem', default=None)


def add_run_context(logger, method_name: str, event_dict: EventDict) -> EventDict:
    """Add run context to log entries"""
    run_id = run_id_ctx.get()
    if run_id:
        event_dict["run_id"] = run_id

    subcommand = subcommand_ctx.get()
    if subcommand:
        event_dict["subcommand"] = subcommand

    problem = problem_ctx.get()
    if problem:
        event_dict["problem"] = problem

    return event_dict


def configure_structured_logging(
    service_name: str = "dsm-solver",
    log_level: str = "WARNING",
    format_type: str = "console",
    stream: Optional[TextIO] = None,
):
    """
    Configure structured logging for the solver

    Args:
        service_name: Name of the service for log context
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        format_type: Output format ('json' or 'console')
        stream: Destination stream, stderr when omitted
    """
    level = getattr(logging, str(log_level).upper())

    def _bind_service(logger, method_name: str, event_dict: EventDict) -> EventDict:
        event_dict.setdefault("service", service_name)
        return event_dict

    def _logger_factory(*args: Any) -> structlog.PrintLogger:
        # sys.stderr is looked up per call so swapped streams are honoured
        return structlog.PrintLogger(file=stream if stream is not None else sys.stderr)

    processors = [
        structlog.processors.add_log_level,
        add_run_context,
        _bind_service,
        structlog.processors.TimeStamper(fmt="ISO"),
    ]

    if format_type == "json":
        processors.append(structlog.processors.JSONRenderer())
    else:
        processors.extend([
            structlog.processors.StackInfoRenderer(),
            structlog.dev.ConsoleRenderer(colors=(stream or sys.stderr).isatty()),
        ])

    structlog.configure(
        processors=processors,
        logger_factory=_logger_factory,
        wrapper_class=structlog.make_filtering_bound_logger(level),
        cache_logger_on_first_use=False,
    )


class DSMLogger:
    """
    Structured logger with solver-specific helpers
    """

    def __init__(self, name: str):
        self.logger = structlog.get_logger(name)
        self.name = name

    def debug(self, message: str, **kwargs):
        self.logger.debug(message, **kwargs)

    def info(self, message: str, **kwargs):
        self.logger.info(message, **kwargs)

    def warning(self, message: str, **kwargs):
        self.logger.warning(message, **kwargs)

    def error(self, message: str, error: Optional[Exception] = None, **kwargs):
        """Log error message with exception context"""
        if error:
            kwargs.update({
                "error_type": type(error).__name__,
                "error_message": str(error),
            })
        self.logger.error(message, **kwargs)

    def critical(self, message: str, **kwargs):
        self.logger.critical(message, **kwargs)

    def log_solve_start(self, problem: str, dimension: int, g0: float, **kwargs):
        """Log the start of a flow integration"""
        self.info(
            "Newton flow started",
            problem=problem,
            dimension=dimension,
            g0=g0,
            stage="start",
            **kwargs
        )

    def log_solve_complete(self, status: str, t_final: float, g_final: float, steps: int, **kwargs):
        """Log the outcome of a flow integration"""
        self.info(
            "Newton flow finished",
            status=status,
            t_final=t_final,
            g_final=g_final,
            steps=steps,
            stage="complete",
            **kwargs
        )

    def log_step_floor(self, t: float, h: float, error_norm: float, **kwargs):
        """Log a step forced at the minimum step size"""
        self.warning(
            "Step forced at minimum size",
            t=t,
            h=h,
            error_norm=error_norm,
            **kwargs
        )

    def log_certificate(self, kind: str, holds: bool, **kwargs):
        """Log a certificate verdict"""
        self.info(
            "Certificate evaluated",
            kind=kind,
            holds=holds,
            **kwargs
        )

    def log_sweep_node(self, s: float, status: str, g_final: float, **kwargs):
        """Log one homotopy node"""
        self.debug(
            "Homotopy node solved",
            s=s,
            status=status,
            g_final=g_final,
            **kwargs
        )

    def log_performance_metric(self, operation: str, duration_ms: float, **kwargs):
        """Log performance metrics"""
        self.info(
            "Performance metric",
            operation=operation,
            duration_ms=duration_ms,
            metric_type="performance",
            **kwargs
        )


def get_logger(name: str) -> DSMLogger:
    """Get a solver logger instance"""
    return DSMLogger(name)


def generate_run_id() -> str:
    """Generate a new run ID"""
    return str(uuid.uuid4())


def log_execution_time(operation_name: str):
    """
    Decorator to log execution time of functions

    Usage:
        @log_execution_time("solve_dsm")
        def solve_dsm(problem, u0, f, config):
            ...
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            logger = get_logger(f"{func.__module__}.{func.__name__}")
            start_time = time.perf_counter()

            try:
                result = func(*args, **kwargs)
            except Exception as e:
                logger.error(
                    f"Operation {operation_name} failed",
                    error=e,
                    duration_ms=(time.perf_counter() - start_time) * 1000,
                    status="error"
                )
                raise

            logger.log_performance_metric(
                operation=operation_name,
                duration_ms=(time.perf_counter() - start_time) * 1000,
                status="success"
            )
            return result

        return wrapper

    return decorator


class LogContext:
    """
    Context manager for scoped logging context

    Usage:
        with LogContext(subcommand="solve", problem="monotone_cubic"):
            logger.info("This will include run_id, subcommand and problem")
    """

    def __init__(self, run_id: str = None, subcommand: str = None, problem: str = None):
        self.run_id = run_id or generate_run_id()
        self.subcommand = subcommand
        self.problem = problem
        self._tokens: list[Any] = []

    def __enter__(self):
        self._tokens = [
            (run_id_ctx, run_id_ctx.set(self.run_id)),
            (subcommand_ctx, subcommand_ctx.set(self.subcommand)),
            (problem_ctx, problem_ctx.set(self.problem)),
        ]
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        for var, token in reversed(self._tokens):
            var.reset(token)
        self._tokens = []


__all__ = [
    'configure_structured_logging',
    'DSMLogger',
    'get_logger',
    'generate_run_id',
    'log_execution_time',
    'LogContext',
]
