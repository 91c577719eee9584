import csv
import json
import os
from typing import Any, Dict, List, Optional

from ..core.utils import ensure_folder, to_jsonable
from ..logging_config import get_logger
from ..models import Trajectory

logger = get_logger("dsm_solver.export")

TRACE_FORMATS = ("csv", "json")
FLOAT_FORMAT = "{:.17g}"


def trace_fieldnames(dimension: int) -> List[str]:
    """Trace header t, g, velocity_norm, u_0, ..., u_{n-1}"""
    return ["t", "g", "velocity_norm"] + [f"u_{i}" for i in range(dimension)]


def render_document(document: Dict[str, Any]) -> str:
    """
    Canonical JSON text of a result document

    Keys are sorted and no wall-clock data is added, so equal documents give
    byte-identical text. Infinite values are written as Infinity.
    """
    return json.dumps(to_jsonable(document), indent=2, sort_keys=True) + "\n"


class TraceExporter:
    """
    Writes flow trajectories and result documents

    Traces go to CSV or JSON with identical fields; CSV floats carry 17
    significant digits so both variants parse back to the same values.
    """

    def __init__(self, output_dir: Optional[str] = None):
        self.output_dir = output_dir or os.getcwd()

    def _resolve(self, filename: str) -> str:
        return ensure_folder(os.path.join(self.output_dir, filename))

    def export_trace_csv(self, trajectory: Trajectory, filename: str) -> str:
        """
        Export a trajectory to CSV

        Args:
            trajectory: Recorded flow
            filename: Output path, relative to output_dir unless absolute

        Returns:
            Path to the exported file
        """
        filepath = self._resolve(filename)
        fieldnames = trace_fieldnames(trajectory.u0.size)
        try:
            with open(filepath, "w", newline="", encoding="utf-8") as f:
                writer = csv.DictWriter(f, fieldnames=fieldnames)
                writer.writeheader()
                for record in trajectory.to_records():
                    writer.writerow({key: FLOAT_FORMAT.format(value) for key, value in record.items()})
        except OSError as e:
            logger.error("Failed to export trace to CSV", error=e, path=filepath)
            raise

        logger.info("Exported trace", format="csv", path=filepath, points=len(trajectory))
        return filepath

    def export_trace_json(self, trajectory: Trajectory, filename: str) -> str:
        """
        Export a trajectory to JSON

        Args:
            trajectory: Recorded flow
            filename: Output path, relative to output_dir unless absolute

        Returns:
            Path to the exported file
        """
        filepath = self._resolve(filename)
        document = {
            "fields": trace_fieldnames(trajectory.u0.size),
            "status": None if trajectory.status is None else trajectory.status.value,
            "records": trajectory.to_records(),
        }
        try:
            with open(filepath, "w", encoding="utf-8") as f:
                f.write(render_document(document))
        except OSError as e:
            logger.error("Failed to export trace to JSON", error=e, path=filepath)
            raise

        logger.info("Exported trace", format="json", path=filepath, points=len(trajectory))
        return filepath

    def export_trace(self, trajectory: Trajectory, filename: str, format_type: str = "csv") -> str:
        if format_type == "csv":
            return self.export_trace_csv(trajectory, filename)
        if format_type == "json":
            return self.export_trace_json(trajectory, filename)
        raise ValueError(f"Unsupported trace format: {format_type}")

    def export_document(self, document: Dict[str, Any], filename: str) -> str:
        """Write a result document as canonical JSON and return its path"""
        filepath = self._resolve(filename)
        with open(filepath, "w", encoding="utf-8") as f:
            f.write(render_document(document))
        logger.info("Exported document", path=filepath)
        return filepath


def read_trace_csv(filepath: str) -> List[Dict[str, float]]:
    """Parse a CSV trace back into records of floats"""
    with open(filepath, newline="", encoding="utf-8") as f:
        return [{key: float(value) for key, value in row.items()} for row in csv.DictReader(f)]


def read_trace_json(filepath: str) -> List[Dict[str, float]]:
    """Parse a JSON trace back into records of floats"""
    with open(filepath, encoding="utf-8") as f:
        document = json.load(f)
    return [{key: float(value) for key, value in record.items()} for record in document["records"]]


__all__ = [
    'TraceExporter',
    'TRACE_FORMATS',
    'trace_fieldnames',
    'render_document',
    'read_trace_csv',
    'read_trace_json',
]
