"""
Satisfaction of assertions by concrete heaps.

A heap fragment satisfies an assertion when it splits exactly into the
heaplets: a points-to owns one cell, a block owns its meta cell, and a
predicate instance owns whatever one of its clauses owns. A location
belongs to the read-only set iff the heaplet owning it is annotated Imm.

Variables without a value are solved for: a points-to binds its value
variable, a predicate hands back the values its clause computed for
argument variables, an equation ``v == t`` binds ``v``, and any numeric
variable left over is enumerated over a candidate list.
"""
from __future__ import annotations

import itertools
import logging
from typing import AbstractSet, Iterable, Iterator, Mapping, Sequence

from ..core import (
    IMM,
    Assertion,
    BinOp,
    Block,
    Expr,
    Heaplet,
    Op,
    PointsTo,
    PredApp,
    PredicateDef,
    Value,
    Var,
    conjuncts,
    evaluate,
)
from .machine import meta

logger = logging.getLogger(__name__)

Env = dict[str, Value]

# unresolved numeric variables enumerated jointly at one point
MAX_ENUMERATED = 3


def try_evaluate(expr: Expr, env: Mapping[str, Value]) -> Value | None:
    """``None`` when a variable of ``expr`` has no value yet."""
    try:
        return evaluate(expr, env)
    except KeyError:
        return None


class Satisfaction:
    """
    Solver for ``(heap, env) |= assertion`` with a fixed read-only set,
    predicate table, unfolding bound and candidate values.
    """

    def __init__(
        self,
        predicates: Mapping[str, PredicateDef],
        ro: AbstractSet[int],
        depth: int,
        candidates: Sequence[int] = tuple(range(10)),
    ) -> None:
        self.predicates = predicates
        self.ro = ro
        self.depth = depth
        self.candidates = list(dict.fromkeys(candidates))

    def models(
        self, assertion: Assertion, heap: Mapping[int, int], env: Mapping[str, Value]
    ) -> Iterator[Env]:
        """Every completion of ``env`` under which ``heap`` satisfies ``assertion`` exactly."""
        solutions = self._solve(
            list(assertion.spatial), conjuncts(assertion.pure), dict(heap), dict(env), self.depth
        )
        for solved, rest in solutions:
            if not rest:
                yield solved

    def holds(
        self, assertion: Assertion, heap: Mapping[int, int], env: Mapping[str, Value]
    ) -> bool:
        return next(self.models(assertion, heap, env), None) is not None

    # --- search -------------------------------------------------------------

    def _solve(
        self,
        pending: list[Heaplet],
        pure: list[Expr],
        heap: dict[int, int],
        env: Env,
        depth: int,
    ) -> Iterator[tuple[Env, dict[int, int]]]:
        if not pending:
            for solved in self._pure(pure, env):
                yield solved, heap
            return
        index = next((i for i, h in enumerate(pending) if self._ready(h, env)), None)
        if index is None:
            return
        heaplet = pending[index]
        rest = pending[:index] + pending[index + 1 :]
        for env_next, heap_next in self._heaplet(heaplet, heap, env, depth):
            yield from self._solve(rest, pure, heap_next, env_next, depth)

    @staticmethod
    def _ready(heaplet: Heaplet, env: Env) -> bool:
        if isinstance(heaplet, PredApp):
            root = heaplet.args[0] if heaplet.args else None
            return root is None or try_evaluate(root, env) is not None
        return try_evaluate(heaplet.base, env) is not None

    def _heaplet(
        self, heaplet: Heaplet, heap: dict[int, int], env: Env, depth: int
    ) -> Iterator[tuple[Env, dict[int, int]]]:
        if isinstance(heaplet, PredApp):
            yield from self._predicate(heaplet, heap, env, depth)
            return
        perm = try_evaluate(heaplet.perm, env)
        if perm is None:
            return
        base = evaluate(heaplet.base, env)
        if not isinstance(base, int):
            return
        if isinstance(heaplet, Block):
            owned, expected = meta(base), heaplet.size
        else:
            owned, expected = base + heaplet.offset, None
        if owned not in heap or (owned in self.ro) != (perm == IMM.kind):
            return
        stored = heap[owned]
        rest = {a: v for a, v in heap.items() if a != owned}
        if isinstance(heaplet, Block):
            if stored == expected:
                yield env, rest
            return
        assert isinstance(heaplet, PointsTo)
        bound = _bind(heaplet.value, stored, env)
        if bound is not None:
            yield bound, rest

    def _predicate(
        self, app: PredApp, heap: dict[int, int], env: Env, depth: int
    ) -> Iterator[tuple[Env, dict[int, int]]]:
        if depth <= 0:
            return
        definition = self.predicates.get(app.name)
        if definition is None:
            raise KeyError(f"Unknown predicate: {app.name}")
        perms = [try_evaluate(p, env) for p in app.perms]
        if any(p is None for p in perms):
            return
        inputs: Env = {}
        for param, arg in zip(definition.params, app.args):
            value = try_evaluate(arg, env)
            if value is not None:
                inputs[param.name] = value
        for param, perm in zip(definition.perm_params, perms):
            assert perm is not None
            inputs[param.name] = perm
        for clause in definition.clauses:
            selector = try_evaluate(clause.selector, inputs)
            if selector is False:
                continue
            pure = [clause.selector, *conjuncts(clause.body.pure)]
            solutions = self._solve(list(clause.body.spatial), pure, heap, dict(inputs), depth - 1)
            for local, rest in solutions:
                outer = _export(definition, app, local, env)
                if outer is not None:
                    yield outer, rest

    def _pure(self, pure: list[Expr], env: Env) -> Iterator[Env]:
        current = dict(env)
        open_: list[Expr] = []
        changed = True
        pending = list(pure)
        while changed:
            changed = False
            open_ = []
            for formula in pending:
                value = try_evaluate(formula, current)
                if value is False:
                    return
                if value is True:
                    continue
                binding = solve_equation(formula, current)
                if binding is not None:
                    name, solved = binding
                    current[name] = solved
                    changed = True
                else:
                    open_.append(formula)
            pending = open_
        if not open_:
            yield current
            return
        names = {v for f in open_ for v in f.free_vars() if v.name not in current}
        unknown = sorted(names, key=lambda v: v.name)
        if len(unknown) > MAX_ENUMERATED or any(not v.sort.numeric for v in unknown):
            logger.debug("Cannot enumerate %s", ", ".join(v.name for v in unknown))
            return
        for values in itertools.product(self.candidates, repeat=len(unknown)):
            trial = dict(current)
            trial.update((v.name, value) for v, value in zip(unknown, values))
            if all(try_evaluate(f, trial) is True for f in open_):
                yield trial


def _bind(term: Expr, value: int, env: Env) -> Env | None:
    known = try_evaluate(term, env)
    if known is not None:
        return env if known == value else None
    if isinstance(term, Var):
        return {**env, term.name: value}
    return None


def solve_equation(formula: Expr, env: Env) -> tuple[str, Value] | None:
    if not (isinstance(formula, BinOp) and formula.op == Op.EQ):
        return None
    for var, term in ((formula.lhs, formula.rhs), (formula.rhs, formula.lhs)):
        if isinstance(var, Var) and var.name not in env:
            value = try_evaluate(term, env)
            if value is not None:
                return var.name, value
    return None


def _export(definition: PredicateDef, app: PredApp, local: Env, env: Env) -> Env | None:
    """Caller environment after a clause matched; unknown argument variables get bound."""
    outer = dict(env)
    for param, arg in zip(definition.params, app.args):
        if param.name not in local:
            continue
        value = local[param.name]
        known = try_evaluate(arg, outer)
        if known is not None:
            if known != value:
                return None
        elif isinstance(arg, Var):
            outer[arg.name] = value
        else:
            return None
    return outer


def satisfies(
    heap: Mapping[int, int],
    env: Mapping[str, Value],
    ro: AbstractSet[int],
    assertion: Assertion,
    predicates: Mapping[str, PredicateDef] | Iterable[PredicateDef],
    depth: int,
    candidates: Sequence[int] = tuple(range(10)),
) -> bool:
    """``(heap, env)`` satisfies ``assertion`` for some values of its unbound variables."""
    table = _table(predicates)
    return Satisfaction(table, ro, depth, candidates).holds(assertion, heap, env)


def _table(
    predicates: Mapping[str, PredicateDef] | Iterable[PredicateDef],
) -> Mapping[str, PredicateDef]:
    if isinstance(predicates, Mapping):
        return predicates
    return {p.name: p for p in predicates}

