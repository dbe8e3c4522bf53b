from __future__ import annotations

from ..config import SolverConfig
from .config import SmtConfig, load_smt_config
from .normal import extract_equalities, nnf, simplify
from .oracle import OracleReport, bounded_valid, random_query, run_oracle_suite
from .smtlib import SmtAnswer, SmtBackend, to_smtlib
from .solver import (
    EntailmentQuery,
    PureSolver,
    SatResult,
    SatStatus,
    SolverStats,
    ValidityResult,
    Verdict,
)


def make_solver(config: SolverConfig, use_smt: bool = True) -> PureSolver:
    """Solver for a SolverConfig, with the external prover when BOSSL_SMT is set."""
    smt_config = load_smt_config(config.smt_timeout_s) if use_smt else None
    return PureSolver(config, SmtBackend(smt_config) if smt_config else None)


__all__ = [
    # solver
    "PureSolver",
    "EntailmentQuery",
    "Verdict",
    "ValidityResult",
    "SatStatus",
    "SatResult",
    "SolverStats",
    "make_solver",
    # normalization
    "simplify",
    "nnf",
    "extract_equalities",
    # external prover
    "SmtConfig",
    "SmtAnswer",
    "SmtBackend",
    "load_smt_config",
    "to_smtlib",
    # oracle
    "OracleReport",
    "bounded_valid",
    "random_query",
    "run_oracle_suite",
]
