"""
Benchmark runs and perturbation sweeps.

Every (benchmark, mode, perturbation) triple is one job. Jobs run in worker
processes, each with its own solver and search; rows are sorted before they
are written, so sweeps are reproducible apart from the time column.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from ..config import MODES, SearchConfig, SolverConfig
from ..engine import Outcome, check_trace, synthesize
from ..specparser import load_spec, print_program
from .corpus import Benchmark
from .records import ERROR, BenchRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchJob:
    benchmark: Benchmark
    mode: str
    perturbation: int
    search: SearchConfig
    solver: SolverConfig
    use_smt: bool = True


def run_job(job: BenchJob) -> BenchRecord:
    """One synthesis run; failures become rows with outcome ``Error``."""
    bench = job.benchmark
    started = time.perf_counter()
    try:
        config = job.search.with_mode(job.mode).with_perturbation(job.perturbation)
        spec = load_spec(bench.path)
        result = synthesize(spec, config, job.solver, job.use_smt)
    except Exception as exc:
        logger.error(
            "%s (%s) %s #%d failed: %s", bench.name, bench.variant, job.mode, job.perturbation, exc
        )
        elapsed = (time.perf_counter() - started) * 1000
        return BenchRecord(
            bench.name, bench.variant, job.mode, job.perturbation, elapsed, None, None, None, ERROR
        )

    stats = result.stats
    timed_out = stats.outcome == Outcome.TIMEOUT
    program = print_program(result.procedure) if result.procedure is not None else ""
    violations = len(check_trace(result.derivation)) if result.derivation is not None else 0
    return BenchRecord(
        name=bench.name,
        variant=bench.variant,
        mode=job.mode,
        perturbation=job.perturbation,
        time_ms=stats.wall_time_ms,
        ast_size=stats.ast_size,
        rules=None if timed_out else stats.rules_fired,
        backtracks=None if timed_out else stats.backtracks,
        outcome=stats.outcome.value,
        program=program,
        violations=violations,
    )


def plan_jobs(
    benchmarks: Iterable[Benchmark],
    search: SearchConfig,
    solver: SolverConfig,
    perturbations: Sequence[int],
    modes: Sequence[str] = MODES,
    use_smt: bool = True,
) -> list[BenchJob]:
    return [
        BenchJob(bench, mode, perturbation, search, solver, use_smt)
        for bench in benchmarks
        for mode in modes
        for perturbation in perturbations
    ]


def run_sweep(
    jobs: Sequence[BenchJob],
    workers: int,
    progress: Callable[[BenchRecord], None] | None = None,
) -> list[BenchRecord]:
    """Run ``jobs`` on up to ``workers`` processes; rows come back sorted."""
    records: list[BenchRecord] = []
    if workers <= 1:
        for job in jobs:
            records.append(_report(run_job(job), progress))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for record in pool.map(run_job, jobs):
                records.append(_report(record, progress))
    records.sort(key=lambda r: r.sort_key)
    return records


def _report(record: BenchRecord, progress: Callable[[BenchRecord], None] | None) -> BenchRecord:
    logger.info(
        "%s (%s) %s #%d: %s",
        record.name,
        record.variant,
        record.mode,
        record.perturbation,
        record.outcome,
    )
    if progress is not None:
        progress(record)
    return record
