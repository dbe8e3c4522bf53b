"""
Benchmark corpus, sweep runner and result statistics.
"""
from .corpus import Benchmark, load_corpus, negative_specs
from .records import CSV_HEADER, ERROR, OUTCOMES, VARIANTS, BenchRecord, read_csv, write_csv
from .runner import BenchJob, plan_jobs, run_job, run_sweep
from .summary import BenchSummary, format_summary, log2_iqr, summarize

__all__ = [
    # corpus
    "Benchmark",
    "load_corpus",
    "negative_specs",
    # records
    "BenchRecord",
    "CSV_HEADER",
    "ERROR",
    "VARIANTS",
    "OUTCOMES",
    "read_csv",
    "write_csv",
    # runs
    "BenchJob",
    "plan_jobs",
    "run_job",
    "run_sweep",
    # statistics
    "BenchSummary",
    "summarize",
    "format_summary",
    "log2_iqr",
]
