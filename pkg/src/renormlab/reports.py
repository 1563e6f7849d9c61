import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from openpyxl import Workbook
from openpyxl.utils.dataframe import dataframe_to_rows
from typeguard import typechecked

from .numerics import CertReal, format_rational


class Verdict(str, Enum):
    """Outcome of a check or of a certificate validation."""

    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"
    VALID = "VALID"
    INVALID = "INVALID"


def to_jsonable(value: Any) -> Any:
    """Recursively convert report payloads into JSON-compatible values.

    Rationals become "p/q" strings; domain objects are serialized through their
    `to_dict` method; anything else falls back to `str`.
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(to_jsonable(v) for v in value)
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    return str(value)


@dataclass
class Report:
    """Result of one verification check.

    Witnesses carry, per sample, the input and both enclosures; `max_radius` and
    `refinements` record how much certified arithmetic the verdict needed.
    """

    check: str
    instance: str
    verdict: Verdict = Verdict.PASS
    seed: Optional[int] = None
    trials: int = 0
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    max_radius: Fraction = Fraction(0)
    refinements: int = 0
    notes: List[str] = field(default_factory=list)
    paper_result: str = ""

    def record(self, verdict: Verdict, *enclosures: CertReal, refinements: int = 0, **witness) -> None:
        """Add one witness and fold its verdict and radii into the report."""
        self.trials += 1
        self.refinements = max(self.refinements, refinements)
        for enc in enclosures:
            self.max_radius = max(self.max_radius, enc.radius)
        if verdict is not Verdict.PASS and verdict is not Verdict.VALID:
            witness["verdict"] = verdict
            self.witnesses.append(witness)
        self.verdict = merge_verdicts([self.verdict, verdict])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "instance": self.instance,
            "seed": self.seed,
            "trials": self.trials,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "max_radius": self.max_radius,
            "refinements": self.refinements,
            "notes": self.notes,
            "paper_result": self.paper_result,
        }

    def to_json(self) -> str:
        return json.dumps(to_jsonable(self.to_dict()), sort_keys=True, indent=2)

    def to_frame(self) -> pd.DataFrame:
        """Witness table of the report, one row per recorded witness."""
        rows = [
            {key: json.dumps(to_jsonable(val), sort_keys=True) for key, val in w.items()}
            for w in self.witnesses
        ]
        return pd.DataFrame(rows)


def merge_verdicts(verdicts: Sequence[Verdict]) -> Verdict:
    """Combine verdicts: any failure wins, then inconclusive, then success."""
    verdicts = list(verdicts)
    for worst in (Verdict.INVALID, Verdict.FAIL, Verdict.INCONCLUSIVE):
        if worst in verdicts:
            return worst
    if Verdict.VALID in verdicts:
        return Verdict.VALID
    return Verdict.PASS


@typechecked
def summary_frame(results: Sequence[Dict[str, Any]]) -> pd.DataFrame:
    """Build the verify-all summary table.

    Args:
        results (Sequence[dict]): One dict per scenario with the keys `scenario`,
            `paper_result`, `verdicts` (check -> verdict) and `met`.

    Returns:
        pd.DataFrame: Columns scenario, paper_result, check, verdict, expected, met.
    """
    columns = ["scenario", "paper_result", "check", "verdict", "expected", "met"]
    rows = []
    for res in results:
        for check, verdict in res["verdicts"].items():
            rows.append(
                {
                    "scenario": res["scenario"],
                    "paper_result": res["paper_result"],
                    "check": check,
                    "verdict": to_jsonable(verdict),
                    "expected": to_jsonable(res["expected"].get(check)),
                    "met": bool(res["met"]),
                }
            )
    return pd.DataFrame(rows, columns=columns)


@typechecked
def write_summary_workbook(frame: pd.DataFrame, output_path: Path) -> Path:
    """Write the verify-all summary table to an Excel workbook.

    Args:
        frame (pd.DataFrame): The summary table from `summary_frame`.
        output_path (Path): Where to save the workbook.

    Returns:
        Path: The path of the saved workbook.

    Raises:
        RuntimeError: If the workbook cannot be saved.
    """
    wb = Workbook()
    ws = wb.active
    ws.title = "summary"
    for row in dataframe_to_rows(frame, index=False, header=True):
        ws.append(row)
    try:
        wb.save(output_path)
    except OSError as e:
        raise RuntimeError(f"Failed to save workbook to '{output_path}': {e}") from e
    return output_path
