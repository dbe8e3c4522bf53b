"""
Per-benchmark statistics over a set of runs.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from itertools import groupby
from typing import Iterable

from ..engine import Outcome
from .records import VARIANTS, BenchRecord


@dataclass(frozen=True)
class BenchSummary:
    name: str
    variant: str
    mode: str
    runs: int
    timeouts: int
    min_rules: int | None
    median_rules: float | None
    max_rules: int | None
    # spread of log2(rules); robustness across perturbations
    log2_iqr: float | None
    # None when the rows carry no program text (read back from CSV)
    distinct_asts: int | None
    violations: int


def log2_iqr(rules: list[int]) -> float:
    if len(rules) < 2:
        return 0.0
    logs = [math.log2(max(r, 1)) for r in rules]
    quartiles = statistics.quantiles(logs, n=4, method="inclusive")
    return quartiles[2] - quartiles[0]


def summarize(records: Iterable[BenchRecord]) -> list[BenchSummary]:
    def key(record: BenchRecord) -> tuple:
        return (record.name, VARIANTS.index(record.variant), record.mode)

    summaries = []
    for _, group in groupby(sorted(records, key=key), key=key):
        rows = list(group)
        first = rows[0]
        timed_out = [r for r in rows if r.outcome == Outcome.TIMEOUT.value]
        rules = [
            r.rules for r in rows if r.rules is not None and r.outcome != Outcome.TIMEOUT.value
        ]
        solved = [r for r in rows if r.outcome == Outcome.SYNTHESIZED.value]
        programs = {r.program for r in solved if r.program}
        summaries.append(
            BenchSummary(
                name=first.name,
                variant=first.variant,
                mode=first.mode,
                runs=len(rows),
                timeouts=len(timed_out),
                min_rules=min(rules) if rules else None,
                median_rules=statistics.median(rules) if rules else None,
                max_rules=max(rules) if rules else None,
                log2_iqr=log2_iqr(rules) if rules else None,
                distinct_asts=len(programs) if programs else (0 if not solved else None),
                violations=sum(r.violations for r in rows),
            )
        )
    return summaries


def format_summary(summaries: Iterable[BenchSummary]) -> str:
    header = (
        f"{'benchmark':<16} {'variant':<7} {'mode':<4} {'runs':>4} {'t/o':>4} "
        f"{'min':>7} {'median':>8} {'max':>7} {'iqr':>6} {'asts':>4}"
    )
    lines = [header, "-" * len(header)]
    for s in summaries:
        lines.append(
            f"{s.name:<16} {s.variant:<7} {s.mode:<4} {s.runs:>4} {s.timeouts:>4} "
            f"{_show(s.min_rules):>7} {_show(s.median_rules):>8} {_show(s.max_rules):>7} "
            f"{_show(s.log2_iqr, 2):>6} {_show(s.distinct_asts):>4}"
        )
    return "\n".join(lines)


def _show(value: float | int | None, digits: int = 0) -> str:
    if value is None:
        return "-"
    if digits:
        return f"{value:.{digits}f}"
    return f"{value:g}" if isinstance(value, float) else str(value)
