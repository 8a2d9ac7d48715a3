"""
Base scan module that defines the abstract base class for all subcommands.
"""

import argparse
import math
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

from heckelab.counting import HyperbolicPoint
from heckelab.errors import HeckelabError
from heckelab.spectral_kernel import SpectralWindow, build_window
from log_service import get_logger
from result_store import ScanResult

logger = get_logger("Scan")


class BaseScan(ABC):
    """Abstract base class for heckelab subcommands.

    Subclasses set ``name`` (the subcommand), ``anchor`` (a short description
    of the result the scan reproduces, stored in the run manifest) and
    ``help``, declare their flags in ``add_arguments`` and compute in ``run``.
    """

    name: str = ""
    anchor: str = ""
    help: str = ""

    def __init__(self, config: Dict[str, Dict[str, Any]], connector=None):
        """Initialize with the merged run settings.

        Args:
            config: Settings keyed by section (see heckelab_config).
            connector: ScanConnector used for parallel work; None runs serially.
        """
        self.config = config
        self.connector = connector
        self.logger = get_logger(self.__class__.__name__)

    @classmethod
    @abstractmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """Declare the subcommand's flags."""

    @abstractmethod
    def run(self, args: argparse.Namespace) -> ScanResult:
        """Compute the scan for parsed arguments."""

    @property
    def seed(self) -> int:
        return int(self.config["runtime"]["seed"])

    def parameters(self, args: argparse.Namespace) -> Dict[str, Any]:
        """Full parameter set for the manifest: flags plus the settings they default to."""
        flags = {
            key: value
            for key, value in sorted(vars(args).items())
            if key not in ("command", "config", "out", "threads", "seed")
        }
        return {"flags": flags, "settings": self.config}

    def map(self, func: Callable, items: Iterable, label: Callable = str) -> List:
        """Run independent work items, in parallel when a connector is attached."""
        if self.connector is None:
            return [func(item) for item in items]
        return self.connector.parallel_map(func, items, label)

    def window(self, delta_supp: Optional[float] = None) -> SpectralWindow:
        settings = self.config["window"]
        return build_window(
            float(settings["delta_supp"] if delta_supp is None else delta_supp),
            settings["truncation_rel_tol"],
            settings["samples_per_period"],
            settings["max_periods"],
        )


def level_list(text: str) -> Tuple[int, ...]:
    """argparse type for comma-separated integers, e.g. "5,13"."""
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Expected comma-separated integers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("Expected at least one integer")
    return values


def real_list(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got {text!r}") from exc


def unit_point(text: str) -> Tuple[float, float, float]:
    """argparse type for a point of S^2 given as "nx,ny,nz"; normalized on the way in."""
    values = real_list(text)
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"Expected three coordinates, got {text!r}")
    norm = math.sqrt(sum(v * v for v in values))
    if not math.isfinite(norm) or norm == 0.0:
        raise argparse.ArgumentTypeError(f"Point {text!r} has no direction")
    return tuple(v / norm for v in values)


def half_plane_point(text: str) -> HyperbolicPoint:
    """argparse type for "re,im" with im > 0."""
    values = real_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"Expected re,im, got {text!r}")
    try:
        return HyperbolicPoint(values[0], values[1])
    except HeckelabError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def value_grid(text: str) -> Tuple[float, ...]:
    """argparse type for "a:b:steps" (inclusive, steps >= 1) or a comma list."""
    if ":" not in text:
        return real_list(text)
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"Expected a:b:steps, got {text!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Expected a:b:steps, got {text!r}") from exc
    if steps < 1 or stop < start:
        raise argparse.ArgumentTypeError(f"Grid {text!r} needs steps >= 1 and a <= b")
    if steps == 1:
        return (start,)
    return tuple(start + (stop - start) * i / (steps - 1) for i in range(steps))


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Expected an integer, got {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"Expected a positive integer, got {value}")
    return value


def nonnegative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Expected an integer, got {text!r}") from exc
    if value < 0:
        raise argparse.ArgumentTypeError(f"Expected a non-negative integer, got {value}")
    return value


def form_index(text: str) -> Tuple[int, int]:
    """argparse type for "k:index"."""
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"Expected k:index, got {text!r}")
    try:
        k, index = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Expected k:index, got {text!r}") from exc
    if k < 0 or not 0 <= index <= 2 * k:
        raise argparse.ArgumentTypeError(f"Form index {index} is outside 0..{2 * k} for k = {k}")
    return k, index
