"""
Configuration data models for the BoSSL synthesizer.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

UNIF_ORDERS = 6
RULE_ORDERS = 7
PERTURBATIONS = UNIF_ORDERS * RULE_ORDERS
MODES = ("imm", "mut")
# budgets a spec file may raise for itself
BUDGETS = ("max_unfold_depth", "max_close_depth", "max_calls_per_path")


@dataclass(frozen=True)
class SearchConfig:
    """Proof search configuration"""
    mode: str
    unif_order: int
    rule_order: int
    timeout_ms: int

    # Termination budgets per derivation path
    max_unfold_depth: int
    max_close_depth: int
    max_calls_per_path: int
    max_derivation_depth: int

    @property
    def perturbation(self) -> int:
        """Single id 0..41; 0 is the default configuration."""
        return self.unif_order * RULE_ORDERS + self.rule_order

    def with_perturbation(self, perturbation: int) -> SearchConfig:
        if not 0 <= perturbation < PERTURBATIONS:
            raise ValueError(f"perturbation must be in 0..{PERTURBATIONS - 1}, got {perturbation}")
        unif_order, rule_order = divmod(perturbation, RULE_ORDERS)
        return replace(self, unif_order=unif_order, rule_order=rule_order)

    def with_mode(self, mode: str) -> SearchConfig:
        if mode not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")
        return replace(self, mode=mode)

    def with_budgets(self, budgets: Iterable[tuple[str, int]]) -> SearchConfig:
        """Per-file overrides of the termination budgets."""
        changes = dict(budgets)
        unknown = sorted(set(changes) - set(BUDGETS))
        if unknown:
            raise ValueError(f"unknown search budget: {', '.join(unknown)}")
        for name, value in changes.items():
            if value < 1:
                raise ValueError(f"{name} must be positive, got {value}")
        return replace(self, **changes)  # type: ignore[arg-type]


@dataclass(frozen=True)
class SolverConfig:
    """Pure solver limits"""
    max_cubes: int
    max_fm_constraints: int
    set_enum_universe: int
    smt_timeout_s: float


@dataclass(frozen=True)
class InterpreterConfig:
    """Interpreter and random model bounds"""
    max_list_length: int
    max_value: int
    fuel: int
    model_attempts: int

    @property
    def unfold_depth(self) -> int:
        return self.max_list_length + 1


@dataclass(frozen=True)
class ValidationConfig:
    """Randomized validation of synthesized programs"""
    samples: int
    seed: int


@dataclass(frozen=True)
class BenchConfig:
    """Benchmark runner configuration"""
    corpus_dir: str
    output_csv: str
    jobs: int
    summary: bool

    def get_corpus_dir_path(self) -> Path:
        return Path(self.corpus_dir)

    def get_output_csv_path(self) -> Path:
        return Path(self.output_csv)


@dataclass(frozen=True)
class LoggingConfig:
    level: str
    format: str


@dataclass(frozen=True)
class BosslConfig:
    """Complete synthesizer configuration"""
    search: SearchConfig
    solver: SolverConfig
    interpreter: InterpreterConfig
    validation: ValidationConfig
    bench: BenchConfig
    logging: LoggingConfig
