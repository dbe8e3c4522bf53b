"""
Configuration module for the BoSSL synthesizer.
"""
from .loader import configure_logging, load_config
from .models import (
    BUDGETS,
    MODES,
    PERTURBATIONS,
    RULE_ORDERS,
    UNIF_ORDERS,
    BenchConfig,
    BosslConfig,
    InterpreterConfig,
    LoggingConfig,
    SearchConfig,
    SolverConfig,
    ValidationConfig,
)

__all__ = [
    "load_config",
    "configure_logging",
    "BosslConfig",
    "SearchConfig",
    "SolverConfig",
    "InterpreterConfig",
    "ValidationConfig",
    "BenchConfig",
    "LoggingConfig",
    "MODES",
    "BUDGETS",
    "UNIF_ORDERS",
    "RULE_ORDERS",
    "PERTURBATIONS",
]
