"""
Random concrete models of preconditions.

A model is laid out heaplet by heaplet: blocks and standalone cells get
fresh addresses, predicate instances are unfolded into structures of a
sampled size, and payloads are drawn within the bounds the clause's pure
part gives them. Borrow variables are set to Mut or Imm independently and
every location owned by an Imm heaplet goes into the read-only set. The
remaining logical variables are completed by the satisfaction solver,
which also certifies the model.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..config import InterpreterConfig
from ..core import (
    IMM,
    MUT,
    Assertion,
    BinOp,
    Block,
    Expr,
    Heaplet,
    Op,
    PointsTo,
    PredApp,
    PredicateDef,
    Sort,
    Value,
    Var,
    conjuncts,
    evaluate,
)
from .machine import meta
from .satisfaction import Satisfaction, solve_equation, try_evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Model:
    heap: dict[int, int]
    env: dict[str, Value]
    ro: frozenset[int]
    blocks: frozenset[int]

    def args(self, formals: Sequence[Var]) -> list[int]:
        values = []
        for formal in formals:
            value = self.env[formal.name]
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"Formal {formal.name} has non-integer value {value!r}")
            values.append(value)
        return values


class ModelBuilder:
    """Samples models of one assertion; each ``build`` starts from a fresh heap."""

    def __init__(
        self,
        predicates: Mapping[str, PredicateDef],
        config: InterpreterConfig,
        rng: random.Random,
    ) -> None:
        self.predicates = predicates
        self.config = config
        self.rng = rng
        self._reset()

    def _reset(self) -> None:
        self.heap: dict[int, int] = {}
        self.ro: set[int] = set()
        self.blocks: set[int] = set()
        self.next_address = 1

    def build(self, assertion: Assertion, formals: Sequence[Var] = ()) -> Model | None:
        """``None`` when no attempt produced a certified model."""
        for attempt in range(self.config.model_attempts):
            model = self._attempt(assertion, formals)
            if model is not None:
                return model
            logger.debug("Model attempt %d rejected", attempt + 1)
        return None

    def _attempt(self, assertion: Assertion, formals: Sequence[Var]) -> Model | None:
        self._reset()
        env: dict[str, Value] = {}
        borrows = sorted(v.name for v in assertion.free_vars() if v.sort == Sort.PERM)
        for name in borrows:
            env[name] = self.rng.choice((MUT.kind, IMM.kind))
        sizes = {
            id(h): self.rng.randint(0, self.config.max_list_length)
            for h in assertion.spatial
            if isinstance(h, PredApp)
        }
        self._layout(assertion.spatial, conjuncts(assertion.pure), env, sizes)

        candidates = list(range(self.config.max_value + 1))
        self.rng.shuffle(candidates)
        candidates += sorted(set(self.heap.values()) - set(candidates))
        checker = Satisfaction(self.predicates, self.ro, self.config.unfold_depth, candidates)
        solved = next(checker.models(assertion, self.heap, env), None)
        if solved is None:
            return None
        for formal in formals:
            if formal.name not in solved:
                solved[formal.name] = self.rng.randint(0, self.config.max_value)
        return Model(dict(self.heap), solved, frozenset(self.ro), frozenset(self.blocks))

    # --- layout -------------------------------------------------------------

    def _layout(
        self,
        heaplets: Sequence[Heaplet],
        pure: list[Expr],
        env: dict[str, Value],
        sizes: Mapping[int, int],
    ) -> None:
        _propagate(pure, env)
        predicates = [h for h in heaplets if isinstance(h, PredApp)]
        roots = {h.args[0].name for h in predicates if h.args and isinstance(h.args[0], Var)}
        cells = [h for h in heaplets if isinstance(h, PointsTo)]
        for heaplet in heaplets:
            if isinstance(heaplet, Block):
                self._block(heaplet, env)
        for cell in cells:
            if not _is_root(cell.value, roots):
                self._cell(cell, env, pure)
        for app in predicates:
            self._predicate(app, env, sizes.get(id(app), 0))
        for cell in cells:
            if _is_root(cell.value, roots):
                self._cell(cell, env, pure)
        _propagate(pure, env)

    def _block(self, block: Block, env: dict[str, Value]) -> None:
        base = try_evaluate(block.base, env)
        if base is None:
            if not isinstance(block.base, Var):
                return
            base = self._fresh(block.size + 1) + 1
            env[block.base.name] = base
        if not isinstance(base, int) or base <= 0:
            return
        self.heap[meta(base)] = block.size
        self.blocks.add(base)
        if evaluate(block.perm, env) == IMM.kind:
            self.ro.add(meta(base))

    def _cell(self, cell: PointsTo, env: dict[str, Value], pure: list[Expr]) -> None:
        base = try_evaluate(cell.base, env)
        if base is None:
            if not isinstance(cell.base, Var):
                return
            base = self._fresh(1)
            env[cell.base.name] = base
        if not isinstance(base, int):
            return
        address = base + cell.offset
        for var in sorted(cell.value.free_vars(), key=lambda v: v.name):
            if var.name not in env:
                env[var.name] = self._sample(var, pure, env)
        value = evaluate(cell.value, env)
        if isinstance(value, bool) or not isinstance(value, int):
            return
        self.heap[address] = value
        if evaluate(cell.perm, env) == IMM.kind:
            self.ro.add(address)

    def _predicate(self, app: PredApp, env: dict[str, Value], size: int) -> None:
        definition = self.predicates[app.name]
        recursive = [c for c in definition.clauses if _nested(c.body)]
        base_cases = [c for c in definition.clauses if not _nested(c.body)]
        if size > 0 and recursive:
            clause = self.rng.choice(recursive)
        elif base_cases:
            clause = self.rng.choice(base_cases)
        else:
            return
        local: dict[str, Value] = {}
        for param, arg in zip(definition.params, app.args):
            value = try_evaluate(arg, env)
            if value is not None:
                local[param.name] = value
        for param, perm in zip(definition.perm_params, app.perms):
            local[param.name] = evaluate(perm, env)
        nested = [h for h in clause.body.spatial if isinstance(h, PredApp)]
        shares = self._split(max(size - 1, 0), len(nested))
        pure = [clause.selector, *conjuncts(clause.body.pure)]
        self._layout(clause.body.spatial, pure, local, dict(zip(map(id, nested), shares)))
        for param, arg in zip(definition.params, app.args):
            if isinstance(arg, Var) and arg.name not in env and param.name in local:
                env[arg.name] = local[param.name]

    # --- sampling -----------------------------------------------------------

    def _fresh(self, cells: int) -> int:
        address = self.next_address
        # one spare cell between allocations keeps meta cells apart
        self.next_address += cells + 1
        return address

    def _split(self, total: int, parts: int) -> list[int]:
        if parts == 0:
            return []
        cuts = sorted(self.rng.randint(0, total) for _ in range(parts - 1))
        bounds = [0, *cuts, total]
        return [high - low for low, high in zip(bounds, bounds[1:])]

    def _sample(self, var: Var, pure: list[Expr], env: Mapping[str, Value]) -> Value:
        if var.sort == Sort.BOOL:
            return self.rng.choice((True, False))
        if var.sort == Sort.SET:
            return frozenset()
        low, high = 0, self.config.max_value
        for formula in pure:
            if not (isinstance(formula, BinOp) and formula.op in (Op.LE, Op.LT)):
                continue
            strict = 1 if formula.op == Op.LT else 0
            if formula.rhs == var:
                bound = try_evaluate(formula.lhs, env)
                if isinstance(bound, int) and not isinstance(bound, bool):
                    low = max(low, bound + strict)
            elif formula.lhs == var:
                bound = try_evaluate(formula.rhs, env)
                if isinstance(bound, int) and not isinstance(bound, bool):
                    high = min(high, bound - strict)
        return self.rng.randint(low, max(low, high))


def _is_root(value: Expr, roots: set[str]) -> bool:
    return isinstance(value, Var) and value.name in roots


def _nested(body: Assertion) -> bool:
    return any(isinstance(h, PredApp) for h in body.spatial)


def _propagate(pure: list[Expr], env: dict[str, Value]) -> None:
    """Bind variables fixed by equations, until nothing changes."""
    changed = True
    while changed:
        changed = False
        for formula in pure:
            binding = solve_equation(formula, env)
            if binding is not None:
                env[binding[0]] = binding[1]
                changed = True


def random_model(
    assertion: Assertion,
    predicates: Mapping[str, PredicateDef],
    config: InterpreterConfig,
    rng: random.Random,
    formals: Sequence[Var] = (),
) -> Model | None:
    return ModelBuilder(predicates, config, rng).build(assertion, formals)
