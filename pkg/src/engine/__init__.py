"""
Deductive synthesis engine: derivation rules, rule orders and proof search.
"""
from .goals import Goal
from .orders import DEFAULT_ORDER, ORDERS, describe_order, rule_order
from .rules import RULES, Normalized, Rule, RuleEnv, RuleResult, normalize
from .search import Derivation, Outcome, ProofSearch, SearchStats, SearchTimeout
from .synthesis import (
    SynthesisResult,
    check_well_formed,
    file_config,
    synthesize,
    synthesize_all,
    synthesize_function,
    synthesize_library,
    to_mut_mode,
)
from .trace import TraceViolation, check_trace

__all__ = [
    # goals and rules
    "Goal",
    "Rule",
    "RuleEnv",
    "RuleResult",
    "RULES",
    "Normalized",
    "normalize",
    # orders
    "ORDERS",
    "DEFAULT_ORDER",
    "rule_order",
    "describe_order",
    # search
    "ProofSearch",
    "SearchStats",
    "SearchTimeout",
    "Outcome",
    "Derivation",
    # entry points
    "SynthesisResult",
    "synthesize",
    "synthesize_function",
    "synthesize_library",
    "synthesize_all",
    "file_config",
    "to_mut_mode",
    "check_well_formed",
    # trace checks
    "TraceViolation",
    "check_trace",
]
