"""
Bounded-enumeration oracle for the pure solver.

Integers and locations range over -4..4, sets over subsets of {0..3},
permissions over Mut/Imm. The suite generates random small queries and
checks every non-Unknown verdict of ``PureSolver`` against enumeration.
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Iterator

from ..config import SolverConfig
from ..core import (
    IMM,
    MUT,
    BinOp,
    Expr,
    IntConst,
    Neg,
    Op,
    SetLit,
    Sort,
    Value,
    Var,
    conj,
    disj,
    eq,
    holds,
)
from .normal import simplify
from .solver import EntailmentQuery, PureSolver, Verdict

logger = logging.getLogger(__name__)

INT_RANGE = range(-4, 5)
SET_ELEMENTS = range(4)
MAX_VALUATIONS = 20000


@dataclass(frozen=True)
class Bounds:
    ints: range = INT_RANGE
    set_elements: range = SET_ELEMENTS

    def domain(self, sort: Sort) -> list[Value]:
        if sort.numeric:
            return list(self.ints)
        if sort == Sort.BOOL:
            return [False, True]
        if sort == Sort.PERM:
            return ["Mut", "Imm"]
        elems = list(self.set_elements)
        return [
            frozenset(combo)
            for width in range(len(elems) + 1)
            for combo in itertools.combinations(elems, width)
        ]

    def contains(self, name_sorts: dict[str, Sort], model: dict[str, Value]) -> bool:
        for name, sort in name_sorts.items():
            value = model.get(name)
            if value not in self.domain(sort):
                return False
        return True


DEFAULT_BOUNDS = Bounds()


def valuation_count(sorts: dict[str, Sort], bounds: Bounds = DEFAULT_BOUNDS) -> int:
    total = 1
    for sort in sorts.values():
        total *= len(bounds.domain(sort))
    return total


def valuations(
    sorts: dict[str, Sort], bounds: Bounds = DEFAULT_BOUNDS
) -> Iterator[dict[str, Value]]:
    names = sorted(sorts)
    domains = [bounds.domain(sorts[name]) for name in names]
    for values in itertools.product(*domains):
        yield dict(zip(names, values))


def bounded_counterexample(
    query: EntailmentQuery,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> dict[str, Value] | None:
    """First in-bounds valuation satisfying the hypothesis but not the conclusion."""
    sorts = query.free_sorts
    count = valuation_count(sorts, bounds)
    if count > MAX_VALUATIONS:
        raise ValueError(f"Query domain too large for enumeration: {count}")
    for env in valuations(sorts, bounds):
        if holds(query.hypothesis, env) and not holds(query.conclusion, env):
            return env
    return None


def bounded_valid(query: EntailmentQuery, bounds: Bounds = DEFAULT_BOUNDS) -> bool:
    return bounded_counterexample(query, bounds) is None


def same_truth_table(left: Expr, right: Expr, bounds: Bounds = DEFAULT_BOUNDS) -> bool:
    sorts = EntailmentQuery(left, right).free_sorts
    return all(holds(left, env) == holds(right, env) for env in valuations(sorts, bounds))


# --- random queries -----------------------------------------------------------

_INTS = [Var("x"), Var("y"), Var("z")]
_SETS = [Var("S", Sort.SET), Var("T", Sort.SET)]
_PERMS = [Var("a", Sort.PERM), Var("b", Sort.PERM)]


def _int_term(rng: random.Random) -> Expr:
    choice = rng.random()
    if choice < 0.4:
        return rng.choice(_INTS)
    if choice < 0.7:
        return IntConst(rng.choice((0, 1, 2)))
    op = rng.choice((Op.PLUS, Op.MINUS))
    return BinOp(op, rng.choice(_INTS), IntConst(rng.choice((1, 2))))


def _set_term(rng: random.Random) -> Expr:
    choice = rng.random()
    if choice < 0.35:
        return rng.choice(_SETS)
    if choice < 0.55:
        return SetLit(tuple(rng.choice(_INTS[:2]) for _ in range(rng.randint(0, 1))))
    return BinOp(Op.UNION, SetLit((rng.choice(_INTS[:2]),)), rng.choice(_SETS))


def _perm_term(rng: random.Random) -> Expr:
    return rng.choice(_PERMS + [MUT, IMM])


def _atom(rng: random.Random) -> Expr:
    kind = rng.random()
    if kind < 0.5:
        op = rng.choice((Op.EQ, Op.LE, Op.LT))
        atom: Expr = BinOp(op, _int_term(rng), _int_term(rng))
    elif kind < 0.8:
        atom = eq(_set_term(rng), _set_term(rng))
    else:
        atom = eq(_perm_term(rng), rng.choice(_PERMS))
    return Neg(atom) if rng.random() < 0.25 else atom


def random_query(rng: random.Random, bounds: Bounds = DEFAULT_BOUNDS) -> EntailmentQuery:
    """Small query whose enumeration domain stays under MAX_VALUATIONS."""
    while True:
        parts = [_atom(rng) for _ in range(rng.randint(0, 3))]
        if parts and rng.random() < 0.2:
            parts = [disj([parts[0], _atom(rng)])] + parts[1:]
        hypothesis = conj(parts)
        conclusion = conj([_atom(rng) for _ in range(rng.randint(1, 2))])
        query = EntailmentQuery(hypothesis, conclusion)
        if valuation_count(query.free_sorts, bounds) <= MAX_VALUATIONS:
            return query


# --- suite --------------------------------------------------------------------

@dataclass
class OracleReport:
    total: int = 0
    valid: int = 0
    invalid: int = 0
    unknown: int = 0
    # Invalid with a countermodel outside the enumeration bounds
    unbounded: int = 0
    simplify_mismatches: int = 0
    disagreements: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.disagreements and not self.simplify_mismatches

    def summary(self) -> str:
        return (
            f"{self.total} queries: {self.valid} valid, {self.invalid} invalid, "
            f"{self.unknown} unknown, {self.unbounded} unbounded countermodels, "
            f"{len(self.disagreements)} disagreements, "
            f"{self.simplify_mismatches} simplify mismatches"
        )


def check_query(
    solver: PureSolver,
    query: EntailmentQuery,
    report: OracleReport,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> None:
    report.total += 1
    result = solver.check_validity(query)
    if result.verdict == Verdict.UNKNOWN:
        report.unknown += 1
        return
    if result.verdict == Verdict.VALID:
        report.valid += 1
        witness = bounded_counterexample(query, bounds)
        if witness is not None:
            report.disagreements.append(f"Valid but refuted by {witness}: {_show(query)}")
        return
    report.invalid += 1
    model = result.countermodel
    if model is None:
        # external prover answer without a model
        if bounded_valid(query, bounds):
            report.unbounded += 1
        return
    if not (holds(query.hypothesis, model) and not holds(query.conclusion, model)):
        report.disagreements.append(f"Invalid with a bogus countermodel {model}: {_show(query)}")
    elif not bounds.contains(query.free_sorts, model):
        report.unbounded += 1


def run_oracle_suite(config: SolverConfig, samples: int, seed: int) -> OracleReport:
    rng = random.Random(seed)
    solver = PureSolver(config)
    report = OracleReport()
    for _ in range(samples):
        query = random_query(rng)
        check_query(solver, query, report)
        for side in (query.hypothesis, query.conclusion):
            if not same_truth_table(side, simplify(side)):
                report.simplify_mismatches += 1
    for line in report.disagreements:
        logger.warning("Pure oracle disagreement: %s", line)
    logger.info("Pure oracle: %s", report.summary())
    return report


def _show(query: EntailmentQuery) -> str:
    return f"{query.hypothesis} => {query.conclusion}"
