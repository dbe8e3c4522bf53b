"""
Benchmark result rows and their CSV form.

Header: name,variant,mode,perturbation,time_ms,ast_size,rules,backtracks,outcome

Timeout rows leave ast_size, rules and backtracks blank; NoSolution rows
leave ast_size blank.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..config import MODES, PERTURBATIONS
from ..engine import Outcome

logger = logging.getLogger(__name__)

CSV_HEADER = (
    "name",
    "variant",
    "mode",
    "perturbation",
    "time_ms",
    "ast_size",
    "rules",
    "backtracks",
    "outcome",
)
VARIANTS = ("shape", "len", "val", "all", "sorted")
# a run that crashed before search finished
ERROR = "Error"
OUTCOMES = tuple(o.value for o in Outcome) + (ERROR,)


@dataclass(frozen=True)
class BenchRecord:
    name: str
    variant: str
    mode: str
    perturbation: int
    time_ms: float
    ast_size: int | None
    rules: int | None
    backtracks: int | None
    outcome: str
    # not written to CSV
    program: str = field(default="", compare=False)
    violations: int = field(default=0, compare=False)

    @property
    def sort_key(self) -> tuple:
        return (self.name, VARIANTS.index(self.variant), self.mode, self.perturbation)

    def to_row(self) -> dict[str, str]:
        return {
            "name": self.name,
            "variant": self.variant,
            "mode": self.mode,
            "perturbation": str(self.perturbation),
            "time_ms": f"{self.time_ms:.1f}",
            "ast_size": _blank(self.ast_size),
            "rules": _blank(self.rules),
            "backtracks": _blank(self.backtracks),
            "outcome": self.outcome,
        }


def _blank(value: int | None) -> str:
    return "" if value is None else str(value)


def write_csv(records: Iterable[BenchRecord], path: str | Path) -> Path:
    """Rows sorted by benchmark, variant, mode and perturbation."""
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    rows = sorted(records, key=lambda r: r.sort_key)
    with output.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_HEADER, lineterminator="\n")
        writer.writeheader()
        for record in rows:
            writer.writerow(record.to_row())
    logger.info("Wrote %d rows to %s", len(rows), output)
    return output


def read_csv(path: str | Path) -> list[BenchRecord]:
    """
    Raises:
        FileNotFoundError: ``path`` does not exist
        ValueError: wrong header or a malformed row, naming ``path:line``
    """
    source = Path(path)
    if not source.exists():
        raise FileNotFoundError(f"Benchmark CSV not found: {source}")
    records: list[BenchRecord] = []
    with source.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(
                f"{source}:1: expected header {','.join(CSV_HEADER)}, "
                f"got {','.join(reader.fieldnames or ())}"
            )
        for row in reader:
            try:
                records.append(_parse_row(row))
            except ValueError as exc:
                raise ValueError(f"{source}:{reader.line_num}: {exc}") from None
    return records


def _parse_row(row: dict[str, str]) -> BenchRecord:
    if None in row or any(value is None for value in row.values()):
        raise ValueError("wrong number of fields")
    if row["variant"] not in VARIANTS:
        raise ValueError(f"unknown variant {row['variant']!r}")
    if row["mode"] not in MODES:
        raise ValueError(f"unknown mode {row['mode']!r}")
    if row["outcome"] not in OUTCOMES:
        raise ValueError(f"unknown outcome {row['outcome']!r}")
    perturbation = _int(row, "perturbation")
    if perturbation is None or not 0 <= perturbation < PERTURBATIONS:
        raise ValueError(f"perturbation must be in 0..{PERTURBATIONS - 1}")
    try:
        time_ms = float(row["time_ms"])
    except ValueError:
        raise ValueError(f"time_ms is not a number: {row['time_ms']!r}") from None
    return BenchRecord(
        name=row["name"],
        variant=row["variant"],
        mode=row["mode"],
        perturbation=perturbation,
        time_ms=time_ms,
        ast_size=_int(row, "ast_size"),
        rules=_int(row, "rules"),
        backtracks=_int(row, "backtracks"),
        outcome=row["outcome"],
    )


def _int(row: dict[str, str], column: str) -> int | None:
    text = row[column].strip()
    if not text:
        return None
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"{column} is not an integer: {text!r}") from None
