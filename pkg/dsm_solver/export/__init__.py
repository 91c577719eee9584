"""
DSM Solver Export
Trace files and result documents
"""

from .exporters import (
    TRACE_FORMATS,
    TraceExporter,
    read_trace_csv,
    read_trace_json,
    render_document,
    trace_fieldnames,
)

__all__ = [
    "TraceExporter",
    "TRACE_FORMATS",
    "trace_fieldnames",
    "render_document",
    "read_trace_csv",
    "read_trace_json",
]
