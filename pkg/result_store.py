"""
Result storage for heckelab runs.

Scans produce either a table (written as CSV) or a single record (written as
JSON). Every file is written atomically: the data goes to a temporary file in
the target directory, which is then renamed over the destination. A manifest
describing the run is stored next to each output as ``<out>.manifest.json``.
"""

import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from heckelab import __version__
from log_service import get_logger

logger = get_logger("ResultStore")

FLOAT_FORMAT = ".17g"


@dataclass
class RunManifest:
    """Class for keeping track of how an output was produced."""

    subcommand: str
    parameters: Dict[str, Any]
    seed: int
    anchor: str
    version: str = __version__
    wall_time: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable(asdict(self))


@dataclass
class ScanResult:
    """Output of one scan: a table (header + rows), a JSON record or a text report.

    Attributes:
        header: Column names; empty for record results.
        rows: Table rows, one value per column.
        record: JSON payload for single-result commands.
        exit_code: Exit status the CLI should report (nonzero for failed checks).
        text: Plain-text report, written verbatim.
    """

    header: List[str] = field(default_factory=list)
    rows: List[Sequence[Any]] = field(default_factory=list)
    record: Optional[Dict[str, Any]] = None
    exit_code: int = 0
    text: Optional[str] = None

    @property
    def is_table(self) -> bool:
        return self.record is None and self.text is None


def format_cell(value: Any) -> str:
    """Render a CSV cell; floats keep 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    if isinstance(value, (tuple, list, np.ndarray)):
        return ";".join(format_cell(item) for item in value)
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, tuples and complex numbers to plain JSON types."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        # JSON has no inf/nan literal
        return number if math.isfinite(number) else str(number)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    if value is None or isinstance(value, str):
        return value
    return str(value)


def render_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(value) for value in row])
    return buffer.getvalue()


def render_json(record: Dict[str, Any]) -> str:
    return json.dumps(to_jsonable(record), indent=2, sort_keys=True) + "\n"


def render(result: ScanResult) -> str:
    if result.text is not None:
        return result.text
    if result.record is not None:
        return render_json(result.record)
    return render_csv(result.header, result.rows)


class ResultStore:
    """Writes scan results and their manifests."""

    def __init__(self, stream=None):
        """
        Args:
            stream: Where results go when no output path is given (default stdout).
        """
        self.stream = stream

    def write_atomic(self, path: str, content: str) -> None:
        """Write content to path through a temporary file and a rename.

        Raises:
            OSError: If the directory is missing or not writable.
        """
        directory = os.path.dirname(os.path.abspath(path))
        handle = tempfile.NamedTemporaryFile(
            mode="w",
            encoding="utf-8",
            newline="",
            dir=directory,
            prefix=".heckelab-",
            suffix=".tmp",
            delete=False,
        )
        try:
            with handle:
                handle.write(content)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(handle.name, path)
        except BaseException:
            if os.path.exists(handle.name):
                os.unlink(handle.name)
            raise
        logger.debug("Wrote %d bytes to %s", len(content), path)

    def save(self, result: ScanResult, out: Optional[str], manifest: RunManifest) -> None:
        """Store a result at out (or stream it) together with its manifest."""
        content = render(result)
        if out is None:
            stream = self.stream or sys.stdout
            stream.write(content)
            stream.flush()
            logger.info("Run manifest: %s", json.dumps(manifest.to_dict(), sort_keys=True))
            return
        self.write_atomic(out, content)
        self.write_atomic(manifest_path(out), render_json(manifest.to_dict()))
        logger.info("Results written to %s", out)


def manifest_path(out: str) -> str:
    return out + ".manifest.json"


def read_csv(path: str) -> List[Dict[str, str]]:
    """Rows of a CSV written by this store, keyed by column name."""
    with open(path, encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))
