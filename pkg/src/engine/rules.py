"""
Derivation rules.

A rule maps a goal to a lazy stream of alternatives. Each alternative is a
``RuleResult``: the subgoals to solve and a producer that assembles their
programs into the statement of this node. Normalization (the substitution
rules, inconsistency checks and pruning) lives in ``normalize``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Callable, Iterator, Sequence

from ..config import SearchConfig
from ..core import (
    FALSE,
    MUT,
    SKIP,
    Assertion,
    BinOp,
    Block,
    Call,
    Error,
    Expr,
    Free,
    FunctionSpec,
    Heaplet,
    If,
    IntConst,
    Load,
    Malloc,
    Neg,
    PointsTo,
    PredApp,
    SetLit,
    Statement,
    Store,
    Substitution,
    Var,
    apply_subst,
    conj,
    conjuncts,
    eq,
    fresh_var,
    heaplet_key,
    neq,
    seq,
)
from ..solver import PureSolver, extract_equalities, simplify
from ..unifier import UnifTask, match_heaplet, rank_candidates, same_shape, unify_pairings
from .goals import Goal, cell_at, duplicate_addresses, missing_facts, over

logger = logging.getLogger(__name__)

Producer = Callable[[Sequence[Statement]], Statement]


@dataclass(frozen=True)
class RuleResult:
    rule: str
    subgoals: tuple[Goal, ...]
    producer: Producer
    description: str = ""
    # caller heaplets handed to a callee
    consumed: tuple[Heaplet, ...] = ()


@dataclass
class RuleEnv:
    """What rules may consult besides the goal."""

    solver: PureSolver
    config: SearchConfig

    @property
    def frozen_tag(self) -> int:
        return self.config.max_unfold_depth + 1

    def valid(self, hypothesis: Expr, conclusion: Expr) -> bool:
        return self.solver.entails(hypothesis, conclusion)

    def inconsistent(self, formula: Expr) -> bool:
        return self.solver.entails(formula, FALSE)


def _terminal(stmt: Statement) -> Producer:
    return lambda _: stmt


def _prepend(*stmts: Statement) -> Producer:
    return lambda children: seq(*stmts, children[0])


def _passthrough(children: Sequence[Statement]) -> Statement:
    return children[0]


def tidy(pure: Expr) -> Expr:
    """Conjunct-wise simplification; trivially true conjuncts disappear."""
    return simplify(conj(conjuncts(pure)))


# --- normalization ------------------------------------------------------------


@dataclass
class Normalized:
    goal: Goal
    steps: list[str] = field(default_factory=list)
    # terminal statement when the precondition is contradictory
    terminal: Statement | None = None
    pruned: str | None = None


def normalize(goal: Goal, env: RuleEnv) -> Normalized:
    """
    Fixpoint of SubstLeft, StarPartialEq and SubstRight, followed by the
    inconsistency checks. Each substitution or added fact counts as a step.
    """
    result = Normalized(goal)
    while True:
        current = result.goal
        step = _subst_left(current) or _star_partial(current) or _subst_right(current)
        if step is None:
            break
        name, result.goal = step
        result.steps.append(name)
    current = result.goal
    current = current.evolve(
        pre=current.pre.with_pure(tidy(current.pre.pure)),
        post=current.post.with_pure(tidy(current.post.pure)),
    )
    result.goal = current
    if env.inconsistent(current.pre.pure):
        result.steps.append("Inconsistency")
        result.terminal = Error()
        return result
    if duplicate_addresses(current.post):
        result.pruned = "postcondition claims one address twice"
        return result
    existentials = current.existentials()
    settled = [c for c in conjuncts(current.post.pure) if not (c.free_vars() & existentials)]
    if settled and env.inconsistent(conj([current.pre.pure, *settled])):
        result.steps.append("PostInconsistency")
        result.pruned = "pure postcondition contradicts the precondition"
        return result
    unsourced = _unsourced_predicate(current, env)
    if unsourced is not None:
        result.pruned = f"no source for {unsourced}"
    return result


def _subst_left(goal: Goal) -> tuple[str, Goal] | None:
    equalities = extract_equalities(goal.pre.pure, lambda v: v not in goal.gamma)
    if not equalities:
        return None
    var, term = equalities[0]
    mapping = Substitution({var: term})
    pure = conj(c for c in conjuncts(goal.pre.pure) if c not in _orientations(var, term))
    updated = goal.evolve(
        pre=goal.pre.with_pure(pure).subst(mapping),
        post=goal.post.subst(mapping),
    )
    return "SubstLeft", replace(updated, ghosts=updated.ghosts - {var})


def _orientations(var: Var, term: Expr) -> list[Expr]:
    return [eq(var, term), eq(term, var)]


def _subst_right(goal: Goal) -> tuple[str, Goal] | None:
    existentials = goal.existentials()
    equalities = extract_equalities(goal.post.pure, lambda v: v in existentials)
    if not equalities:
        return None
    var, term = equalities[0]
    pure = conj(
        c for c in conjuncts(goal.post.pure) if c not in _orientations(var, term)
    )
    post = goal.post.with_pure(pure).subst(Substitution({var: term}))
    return "SubstRight", goal.evolve(post=post)


def _star_partial(goal: Goal) -> tuple[str, Goal] | None:
    facts = missing_facts(goal.pre)
    if not facts:
        return None
    return "StarPartialEq", goal.evolve(pre=goal.pre.add_pure(*facts))


def _unsourced_predicate(goal: Goal, env: RuleEnv) -> PredApp | None:
    """
    A postcondition instance past the close budget must come from the
    precondition or from a callee that produces it without consuming one.
    """
    present = {h.name for h in goal.pre.spatial if isinstance(h, PredApp)}
    for heaplet in goal.post.spatial:
        if not isinstance(heaplet, PredApp) or heaplet.tag < env.config.max_close_depth:
            continue
        if heaplet.name in present:
            continue
        if not any(_produces(spec, heaplet.name) for spec in goal.sigma.functions.values()):
            return heaplet
    return None


def _produces(spec: FunctionSpec, name: str) -> bool:
    def names(assertion: Assertion) -> set[str]:
        return {h.name for h in assertion.spatial if isinstance(h, PredApp)}

    return name in names(spec.post) and name not in names(spec.pre)


# --- rules --------------------------------------------------------------------


class Rule:
    """
    Base class; ``apply`` yields alternatives in the order they are tried.
    An invertible rule never needs backtracking: search commits to its first
    alternative ahead of the configured order.
    """

    name = "Rule"
    invertible = False

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        raise NotImplementedError

    def result(
        self, subgoals: tuple[Goal, ...], producer: Producer, description: str = ""
    ) -> RuleResult:
        return RuleResult(self.name, subgoals, producer, description)

    def __repr__(self) -> str:
        return self.name


class EmpRule(Rule):
    name = "Emp"

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        if goal.pre.is_emp() and goal.post.is_emp():
            if env.valid(goal.pre.pure, goal.post.pure):
                yield self.result((), _terminal(SKIP))


class FrameRule(Rule):
    """
    Remove a heaplet present on both sides. Predicate instances also frame
    when their arguments differ only up to equalities the precondition entails.
    """

    name = "Frame"

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        existentials = goal.existentials()
        closed = [h for h in goal.post.spatial if not h.free_vars() & existentials]
        if goal.has_predicates():
            closed = [h for h in closed if isinstance(h, PredApp)]
        for heaplet in closed:
            if heaplet in goal.pre.spatial:
                yield self._frame(goal, heaplet, heaplet)
                return
        for heaplet in closed:
            if not isinstance(heaplet, PredApp):
                continue
            for candidate in goal.pre.spatial:
                if _equal_modulo_pure(heaplet, candidate, goal, env):
                    yield self._frame(goal, candidate, heaplet)
                    return

    def _frame(self, goal: Goal, source: Heaplet, target: Heaplet) -> RuleResult:
        framed = goal.evolve(pre=goal.pre.remove(source), post=goal.post.remove(target))
        return self.result((framed,), _passthrough, str(target))


def _equal_modulo_pure(post: PredApp, pre: Heaplet, goal: Goal, env: RuleEnv) -> bool:
    if not (isinstance(pre, PredApp) and same_shape(post, pre) and post.perms == pre.perms):
        return False
    differing = [(a, b) for a, b in zip(post.args, pre.args) if a != b]
    return all(env.valid(goal.pre.pure, eq(a, b)) for a, b in differing)


class UnifyHeapsRule(Rule):
    name = "UnifyHeaps"

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        existentials = goal.existentials()
        if not existentials:
            return
        unfolding = goal.has_predicates()
        pairs = [
            (target, pattern)
            for pattern in goal.post.spatial
            if pattern.free_vars() & existentials
            and (isinstance(pattern, PredApp) or not unfolding)
            for target in goal.pre.spatial
            if same_shape(pattern, target)
        ]
        seen: set[Substitution] = set()
        for target, pattern in rank_candidates(pairs, env.config.unif_order):
            sigma = match_heaplet(pattern, target, existentials, Substitution(), loose=True)
            if not sigma or sigma in seen:
                continue
            seen.add(sigma)
            unified = goal.evolve(post=goal.post.subst(sigma))
            yield self.result((unified,), _passthrough, f"{sigma}")


class PickRule(Rule):
    """Instantiate a value existential with a program variable or a literal."""

    name = "Pick"

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        if goal.has_predicates():
            return
        bases = {
            v
            for h in goal.post.spatial
            if isinstance(h, (PointsTo, Block))
            for v in h.base.free_vars()
        }
        candidates = sorted(
            (v for v in goal.existentials() if v.sort.numeric and v not in bases),
            key=lambda v: v.name,
        )
        if not candidates:
            return
        var = candidates[0]
        images: list[Expr] = sorted(
            (v for v in goal.gamma if v.sort.numeric), key=lambda v: v.name
        )
        images += [IntConst(n) for n in sorted(_literals(goal) | {0})]
        for image in images:
            picked = goal.evolve(post=goal.post.subst(Substitution({var: image})))
            yield self.result((picked,), _passthrough, f"{image}/{var.name}")


def _literals(goal: Goal) -> set[int]:
    found: set[int] = set()

    def walk(expr: Expr) -> None:
        if isinstance(expr, IntConst):
            found.add(expr.value)
        elif isinstance(expr, BinOp):
            walk(expr.lhs)
            walk(expr.rhs)
        elif isinstance(expr, Neg):
            walk(expr.arg)
        elif isinstance(expr, SetLit):
            for elem in expr.elems:
                walk(elem)

    for assertion in (goal.pre, goal.post):
        walk(assertion.pure)
        for heaplet in assertion.spatial:
            if isinstance(heaplet, PointsTo):
                walk(heaplet.value)
            elif isinstance(heaplet, PredApp):
                for arg in heaplet.args:
                    walk(arg)
    return found


class ReadRule(Rule):
    """Loading a ghost into a program variable loses nothing."""

    name = "Read"
    invertible = True

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        for cell in goal.pre.spatial:
            if not isinstance(cell, PointsTo) or not over(cell.base, goal.gamma):
                continue
            ghost = cell.value
            if not isinstance(ghost, Var) or ghost in goal.gamma or not ghost.sort.numeric:
                continue
            rest = goal.pre.remove(cell)
            if ghost not in rest.free_vars() | goal.post.free_vars():
                continue
            read = goal.evolve(gamma=goal.gamma | {ghost})
            load = Load(ghost.name, cell.base, cell.offset)
            yield self.result((read,), _prepend(load), str(cell))
            return


class WriteRule(Rule):
    """WriteRO: only cells annotated ``Mut`` on both sides may be overwritten."""

    name = "WriteRO"

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        if goal.has_predicates():
            return
        for wanted in goal.post.spatial:
            if not isinstance(wanted, PointsTo) or wanted.perm != MUT:
                continue
            if not (over(wanted.base, goal.gamma) and over(wanted.value, goal.gamma)):
                continue
            current = cell_at(goal.pre.spatial, wanted.base, wanted.offset)
            if current is None or current.perm != MUT or current.value == wanted.value:
                continue
            updated = PointsTo(current.base, current.offset, wanted.value, MUT)
            rest = goal.pre.remove(current)
            pre = rest.with_spatial(rest.spatial + (updated,))
            store = Store(wanted.base, wanted.offset, wanted.value)
            yield self.result((goal.evolve(pre=pre),), _prepend(store), str(updated))
            return


class AllocRule(Rule):
    name = "Alloc"

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        if goal.has_predicates():
            return
        existentials = goal.existentials()
        for block in goal.post.spatial:
            if not isinstance(block, Block) or block.base not in existentials:
                continue
            base = block.base
            assert isinstance(base, Var)
            if any(cell_at(goal.post.spatial, base, i) is None for i in range(block.size)):
                continue
            used = goal.used_names()
            cells: list[Heaplet] = [Block(base, block.size, MUT)]
            fresh: list[Var] = []
            for offset in range(block.size):
                value = fresh_var(Var("t"), used)
                used.add(value.name)
                fresh.append(value)
                cells.append(PointsTo(base, offset, value, MUT))
            pre = goal.pre.with_spatial(goal.pre.spatial + tuple(cells)).add_pure(
                neq(base, IntConst(0))
            )
            allocated = goal.evolve(
                gamma=goal.gamma | {base},
                ghosts=goal.ghosts | frozenset(fresh),
                pre=pre,
            )
            yield self.result(
                (allocated,), _prepend(Malloc(base.name, block.size)), str(block)
            )
            return


class FreeRule(Rule):
    name = "Free"

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        if goal.has_predicates():
            return
        for block in goal.pre.spatial:
            if not isinstance(block, Block) or block.perm != MUT:
                continue
            if not over(block.base, goal.gamma):
                continue
            cells = [cell_at(goal.pre.spatial, block.base, i) for i in range(block.size)]
            if any(cell is None or cell.perm != MUT for cell in cells):
                continue
            if any(
                isinstance(h, (PointsTo, Block)) and h.base == block.base
                for h in goal.post.spatial
            ):
                continue
            pre = goal.pre.remove(block)
            for cell in cells:
                assert cell is not None
                pre = pre.remove(cell)
            yield self.result(
                (goal.evolve(pre=pre),), _prepend(Free(block.base)), str(block)
            )
            return


class OpenRule(Rule):
    """Case-split on a precondition predicate whose selectors are executable."""

    name = "Open"

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        for app in goal.pre.spatial:
            if not isinstance(app, PredApp) or app.tag >= env.config.max_unfold_depth:
                continue
            definition = goal.sigma.predicate(app.name)
            used = goal.used_names()
            branches: list[tuple[Expr, Assertion]] = []
            for clause in definition.clauses:
                renaming = _rename_locals(definition.clause_locals(clause), used)
                branches.append(definition.instantiate(clause, app, renaming))
            selectors = [selector for selector, _ in branches]
            if not all(over(s, goal.gamma) for s in selectors):
                continue
            rest = goal.pre.remove(app)
            subgoals: list[Goal] = []
            for index, (selector, body) in enumerate(branches):
                guard = [Neg(s) for s in selectors[:index]] + [selector, body.pure]
                heaplets = tuple(_retag(h, app.tag + 1) for h in body.spatial)
                pre = Assertion.of(conj([rest.pure, *guard]), rest.spatial + heaplets)
                subgoals.append(goal.evolve(pre=pre))
            yield RuleResult(self.name, tuple(subgoals), _cascade(selectors), str(app))


def _cascade(selectors: list[Expr]) -> Producer:
    def build(children: Sequence[Statement]) -> Statement:
        result = children[-1]
        for selector, child in reversed(list(zip(selectors[:-1], children[:-1]))):
            result = If(selector, child, result)
        return result

    return build


def _rename_locals(locals_: frozenset[Var], used: set[str]) -> dict[Var, Expr]:
    renaming: dict[Var, Expr] = {}
    for var in sorted(locals_, key=lambda v: v.name):
        fresh = fresh_var(var, used)
        used.add(fresh.name)
        renaming[var] = fresh
    return renaming


def _retag(heaplet: Heaplet, tag: int) -> Heaplet:
    return heaplet.with_tag(tag) if isinstance(heaplet, PredApp) else heaplet


class CloseRule(Rule):
    """
    Replace a postcondition predicate by one of its clauses. Only the first
    closable instance is unfolded here; the others stay closable in the
    subgoals.
    """

    name = "Close"

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        closable = [
            h
            for h in goal.post.spatial
            if isinstance(h, PredApp) and h.tag < env.config.max_close_depth
        ]
        for app in closable[:1]:
            definition = goal.sigma.predicate(app.name)
            rest = goal.post.remove(app)
            for clause in definition.clauses:
                used = goal.used_names()
                renaming = _rename_locals(definition.clause_locals(clause), used)
                selector, body = definition.instantiate(clause, app, renaming)
                heaplets = tuple(_retag(h, app.tag + 1) for h in body.spatial)
                post = Assertion.of(
                    conj([rest.pure, selector, body.pure]), rest.spatial + heaplets
                )
                closed = goal.evolve(post=post)
                yield self.result((closed,), _passthrough, f"{app} by {selector}")


class CallRule(Rule):
    """
    Call a function of Sigma on a sub-heap of the precondition. Callee cells
    whose value differs from the caller's are first established by stores.
    Formals the heap match leaves unbound take a program variable of their
    sort. When the callee's pure precondition is only missing a condition
    the program can test, the call is guarded by it and the other branch
    becomes a goal of its own.
    """

    name = "Call"

    def apply(self, goal: Goal, env: RuleEnv) -> Iterator[RuleResult]:
        if goal.calls >= env.config.max_calls_per_path:
            return
        for name in sorted(goal.sigma.functions):
            spec = goal.sigma.functions[name]
            yield from self._calls(goal, spec, env)

    def _calls(self, goal: Goal, spec: FunctionSpec, env: RuleEnv) -> Iterator[RuleResult]:
        formals, pre, post, bindable = _callee_instance(spec, goal.used_names())
        if not pre.spatial:
            return
        task = UnifTask(goal.pre.spatial, pre.spatial, bindable)
        seen: set[tuple] = set()
        for matching in unify_pairings(task, env.config.unif_order, abduce=True):
            consumed = matching.matched_targets()
            if spec.name == goal.fname and not _decreasing(consumed, env):
                continue
            for sigma in _bind_formals(matching.sigma, formals, goal.gamma):
                stores = self._stores(matching.stores, sigma, goal)
                if stores is None:
                    continue
                required = apply_subst(sigma, pre.pure)
                if required.free_vars() & bindable:
                    continue
                actuals = tuple(sigma[f] for f in formals)
                remaining = list(goal.pre.spatial)
                for heaplet in consumed:
                    remaining.remove(heaplet)
                returned = tuple(
                    _retag(apply_subst(sigma, h), env.frozen_tag) for h in post.spatial
                )
                after = Assertion.of(
                    conj([goal.pre.pure, apply_subst(sigma, post.pure)]),
                    tuple(remaining) + returned,
                )
                key = (actuals, tuple(stores), str(after))
                if key in seen:
                    continue
                seen.add(key)
                call = Call(spec.name, actuals)
                description = f"{spec.name}{actuals}"
                if env.valid(goal.pre.pure, required):
                    called = goal.evolve(pre=after, calls=goal.calls + 1)
                    yield RuleResult(
                        self.name,
                        (called,),
                        _prepend(*stores, call),
                        description,
                        tuple(consumed),
                    )
                    continue
                guard = _branch_guard(goal, required, env)
                if guard is None:
                    continue
                called = goal.evolve(pre=after.add_pure(guard), calls=goal.calls + 1)
                otherwise = goal.evolve(pre=goal.pre.add_pure(Neg(guard)))
                yield RuleResult(
                    self.name,
                    (called, otherwise),
                    _guarded(guard, *stores, call),
                    f"{description} if {guard}",
                    tuple(consumed),
                )

    @staticmethod
    def _stores(
        pairs: tuple[tuple[PointsTo, PointsTo], ...],
        sigma: Substitution,
        goal: Goal,
    ) -> list[Statement] | None:
        stores: list[Statement] = []
        for target, pattern in sorted(pairs, key=lambda pair: heaplet_key(pair[0])):
            value = apply_subst(sigma, pattern.value)
            # the plain pairing covers equal values
            if value == target.value:
                return None
            if not (over(value, goal.gamma) and over(target.base, goal.gamma)):
                return None
            stores.append(Store(target.base, target.offset, value))
        return stores


def _bind_formals(
    sigma: Substitution, formals: tuple[Var, ...], gamma: frozenset[Var]
) -> Iterator[Substitution]:
    if any(f in sigma and not over(sigma[f], gamma) for f in formals):
        return
    unbound = [f for f in formals if f not in sigma]
    choices = [
        sorted((v for v in gamma if v.sort == formal.sort), key=lambda v: v.name)
        for formal in unbound
    ]
    for images in product(*choices):
        extended = sigma
        for formal, image in zip(unbound, images):
            extended = extended.extend(formal, image)
        yield extended


def _branch_guard(goal: Goal, required: Expr, env: RuleEnv) -> Expr | None:
    """The conjuncts of ``required`` the precondition misses, if Gamma can test them."""
    missing = [c for c in conjuncts(required) if not env.valid(goal.pre.pure, c)]
    guard = conj(missing)
    if not missing or not over(guard, goal.gamma):
        return None
    if env.inconsistent(conj([goal.pre.pure, guard])):
        return None
    return guard


def _guarded(guard: Expr, *stmts: Statement) -> Producer:
    return lambda children: If(guard, seq(*stmts, children[0]), children[1])


def _callee_instance(
    spec: FunctionSpec, used: set[str]
) -> tuple[tuple[Var, ...], Assertion, Assertion, frozenset[Var]]:
    """Callee spec with every variable renamed apart from the caller's."""
    variables = spec.pre.free_vars() | spec.post.free_vars() | set(spec.formals)
    renaming: dict[Var, Expr] = {}
    taken = set(used)
    for var in sorted(variables, key=lambda v: v.name):
        fresh = fresh_var(var, taken)
        taken.add(fresh.name)
        renaming[var] = fresh
    mapping = Substitution(renaming)
    formals = tuple(apply_subst(mapping, f) for f in spec.formals)
    bindable = frozenset(
        apply_subst(mapping, v) for v in spec.pre.free_vars() | set(spec.formals)
    )
    return (
        formals,  # type: ignore[return-value]
        apply_subst(mapping, spec.pre),
        apply_subst(mapping, spec.post),
        bindable,  # type: ignore[arg-type]
    )


def _decreasing(consumed: list[Heaplet], env: RuleEnv) -> bool:
    """A recursive call needs an unfolded, non-frozen predicate instance."""
    apps = [h for h in consumed if isinstance(h, PredApp)]
    if any(app.tag > env.config.max_unfold_depth for app in apps):
        return False
    return any(app.tag >= 1 for app in apps)


RULES: dict[str, Rule] = {
    rule.name: rule
    for rule in (
        EmpRule(),
        FrameRule(),
        OpenRule(),
        CloseRule(),
        UnifyHeapsRule(),
        PickRule(),
        ReadRule(),
        WriteRule(),
        AllocRule(),
        FreeRule(),
        CallRule(),
    )
}
