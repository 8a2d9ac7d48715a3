"""
Report service for heckelab selfcheck runs.

Builds a plain-text report of check outcomes, grouped by library module.
The report carries no timestamps or timings, so two runs with the same seed
produce identical bytes.
"""

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Sequence

from log_service import get_logger

logger = get_logger("ReportService")

VALUE_FORMAT = ".6e"


@dataclass(frozen=True)
class CheckOutcome:
    """Result of one invariant check.

    Attributes:
        module: Library module the check exercises.
        name: Short check name.
        value: Measured quantity (an error, a residual or a count).
        threshold: Largest value that passes.
        passed: Whether value <= threshold.
    """

    module: str
    name: str
    value: float
    threshold: float
    passed: bool

    @classmethod
    def at_most(cls, module: str, name: str, value: float, threshold: float) -> "CheckOutcome":
        return cls(module, name, float(value), float(threshold), bool(value <= threshold))


class ReportService:
    """Service for rendering selfcheck outcomes."""

    def __init__(self, title: str = "heckelab selfcheck"):
        self.title = title

    def build_report(self, outcomes: Sequence[CheckOutcome], seed: int) -> str:
        """Render outcomes as text, one section per module in order of first appearance.

        Args:
            outcomes: Check outcomes
            seed: Seed the run used

        Returns:
            The report, ending with a summary line
        """
        lines = [f"{self.title} (seed {seed})", ""]
        for module, checks in self._group_outcomes_by_module(outcomes).items():
            lines.append(f"[{module}]")
            for check in checks:
                status = "PASS" if check.passed else "FAIL"
                lines.append(
                    f"  {status}  {check.name:<32} "
                    f"{format(check.value, VALUE_FORMAT):>14} <= {format(check.threshold, VALUE_FORMAT)}"
                )
            lines.append("")

        failed = [check for check in outcomes if not check.passed]
        lines.append(f"{len(outcomes) - len(failed)}/{len(outcomes)} checks passed")
        if failed:
            logger.error("Failed checks: %s", ", ".join(f"{c.module}.{c.name}" for c in failed))
        return "\n".join(lines) + "\n"

    def _group_outcomes_by_module(self, outcomes: Sequence[CheckOutcome]) -> Dict[str, List[CheckOutcome]]:
        """Group outcomes by module, keeping the order of first appearance."""
        grouped: Dict[str, List[CheckOutcome]] = defaultdict(list)
        for outcome in outcomes:
            grouped[outcome.module].append(outcome)
        return grouped
