"""
Synthesis entry points: one function spec, or a whole spec file with its
library functions.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace

from ..config import SearchConfig, SolverConfig
from ..core import (
    MUT,
    Context,
    FunctionSpec,
    Procedure,
    Sort,
    Substitution,
    WellFormednessError,
    check_pred_well_formed,
    check_spec_well_formed,
)
from ..solver import PureSolver, make_solver
from ..specparser import SpecFile, ast_size
from .goals import Goal
from .orders import rule_order
from .rules import RuleEnv
from .search import Derivation, Outcome, ProofSearch, SearchStats, SearchTimeout

logger = logging.getLogger(__name__)


@dataclass
class SynthesisResult:
    spec: FunctionSpec
    procedure: Procedure | None
    stats: SearchStats
    derivation: Derivation | None = None

    @property
    def succeeded(self) -> bool:
        return self.procedure is not None


def to_mut_mode(spec: SpecFile) -> SpecFile:
    """Every borrow annotation of every function spec becomes ``Mut``."""

    def rewrite(function: FunctionSpec) -> FunctionSpec:
        variables = function.pre.free_vars() | function.post.free_vars()
        sigma = Substitution({v: MUT for v in variables if v.sort == Sort.PERM})
        return replace(function, pre=function.pre.subst(sigma), post=function.post.subst(sigma))

    return replace(
        spec,
        library=tuple(rewrite(f) for f in spec.library),
        goal_spec=rewrite(spec.goal_spec),
    )


def check_well_formed(spec: SpecFile) -> None:
    violations = []
    for definition in spec.predicates:
        violations += check_pred_well_formed(definition)
    for function in spec.functions:
        violations += check_spec_well_formed(function)
    if violations:
        raise WellFormednessError(violations)


def prepare(spec: SpecFile, config: SearchConfig) -> SpecFile:
    check_well_formed(spec)
    return to_mut_mode(spec) if config.mode == "mut" else spec


def file_config(spec: SpecFile, config: SearchConfig) -> SearchConfig:
    """``config`` with the budgets the spec file raises for itself."""
    return config.with_budgets(spec.budgets)


def synthesize_function(
    function: FunctionSpec,
    sigma: Context,
    config: SearchConfig,
    solver: PureSolver,
) -> SynthesisResult:
    """Search for a body of ``function``; ``sigma`` must already contain it."""
    env = RuleEnv(solver, config)
    search = ProofSearch(env, rule_order(config.rule_order))
    queries_before = solver.stats.queries
    solver_ms_before = solver.stats.time_ms
    started = time.perf_counter()
    procedure: Procedure | None = None
    derivation: Derivation | None = None
    try:
        found = search.run(Goal.of(function, sigma))
        if found is not None:
            body, derivation = found
            procedure = Procedure(function.name, function.formals, body)
            search.stats.outcome = Outcome.SYNTHESIZED
            search.stats.ast_size = ast_size(procedure)
    except SearchTimeout:
        search.stats.outcome = Outcome.TIMEOUT
    stats = search.stats
    stats.wall_time_ms = (time.perf_counter() - started) * 1000
    stats.solver_queries = solver.stats.queries - queries_before
    stats.solver_time_ms = solver.stats.time_ms - solver_ms_before
    logger.debug(
        "%s: %s after %d rules, %d backtracks",
        function.name,
        stats.outcome.value,
        stats.rules_fired,
        stats.backtracks,
    )
    return SynthesisResult(function, procedure, stats, derivation)


def synthesize(
    spec: SpecFile,
    config: SearchConfig,
    solver_config: SolverConfig,
    use_smt: bool = True,
) -> SynthesisResult:
    """Synthesize the goal function of ``spec`` with every declared function callable."""
    config = file_config(spec, config)
    prepared = prepare(spec, config)
    solver = make_solver(solver_config, use_smt)
    return synthesize_function(prepared.goal_spec, prepared.context(), config, solver)


def synthesize_library(
    spec: SpecFile,
    config: SearchConfig,
    solver_config: SolverConfig,
    use_smt: bool = True,
) -> list[SynthesisResult]:
    """
    Library functions in declaration order; each may call itself and the
    ones declared before it.
    """
    config = file_config(spec, config)
    prepared = prepare(spec, config)
    solver = make_solver(solver_config, use_smt)
    return _library(prepared, config, solver)


def synthesize_all(
    spec: SpecFile,
    config: SearchConfig,
    solver_config: SolverConfig,
    use_smt: bool = True,
) -> tuple[list[SynthesisResult], SynthesisResult]:
    """The library and then the goal, sharing one prepared spec and one solver."""
    config = file_config(spec, config)
    prepared = prepare(spec, config)
    solver = make_solver(solver_config, use_smt)
    library = _library(prepared, config, solver)
    goal = synthesize_function(prepared.goal_spec, prepared.context(), config, solver)
    return library, goal


def _library(
    prepared: SpecFile, config: SearchConfig, solver: PureSolver
) -> list[SynthesisResult]:
    predicates = {p.name: p for p in prepared.predicates}
    results: list[SynthesisResult] = []
    functions: dict[str, FunctionSpec] = {}
    for function in prepared.library:
        functions[function.name] = function
        sigma = Context(predicates, dict(functions))
        result = synthesize_function(function, sigma, config, solver)
        if not result.succeeded:
            logger.warning("Library function %s: %s", function.name, result.stats.outcome.value)
        results.append(result)
    return results
