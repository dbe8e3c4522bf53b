"""
Search goals: a synthesis goal plus the bookkeeping proof search needs.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from itertools import combinations

from ..core import (
    Assertion,
    BinOp,
    Block,
    Context,
    Expr,
    FunctionSpec,
    IntConst,
    Neg,
    PointsTo,
    PredApp,
    Substitution,
    SynthGoal,
    Var,
    conjuncts,
    goal_of,
    neq,
)
from ..core.context import classify_vars, var_names

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Goal:
    """
    ``gamma`` are program variables. ``ghosts`` keeps every universally
    quantified logical variable seen so far, so framing a heaplet away never
    turns a ghost into an existential.
    """

    gamma: frozenset[Var]
    ghosts: frozenset[Var]
    pre: Assertion
    post: Assertion
    sigma: Context = field(compare=False)
    fname: str
    calls: int = 0

    @classmethod
    def of(cls, spec: FunctionSpec, sigma: Context) -> Goal:
        gamma, ghosts, _ = classify_vars(goal_of(spec, sigma))
        return cls(gamma, ghosts, spec.pre, spec.post, sigma, spec.name)

    def universals(self) -> frozenset[Var]:
        return self.gamma | self.ghosts | self.pre.free_vars()

    def existentials(self) -> frozenset[Var]:
        return self.post.free_vars() - self.universals()

    def used_names(self) -> set[str]:
        return var_names(self.universals() | self.post.free_vars())

    def evolve(self, **changes: object) -> Goal:
        """Copy with ``changes``; everything in the old precondition stays universal."""
        updated = replace(self, **changes)  # type: ignore[arg-type]
        ghosts = (self.ghosts | self.pre.free_vars() | updated.ghosts) - updated.gamma
        return replace(updated, ghosts=ghosts)

    def synth_goal(self) -> SynthGoal:
        return SynthGoal(self.gamma, self.pre, self.post, self.sigma)

    def has_predicates(self) -> bool:
        """Unfolding phase: some predicate instance is still on either side."""
        return any(
            isinstance(h, PredApp) for h in self.pre.spatial + self.post.spatial
        )

    def key(self) -> tuple:
        """
        Goal content up to a consistent renaming of variables, tags included;
        used for failure memoization. Variables are numbered by their first
        occurrence in the printed goal, so goals that differ only in fresh
        names usually share a key.
        """
        variables = {v.name: v for v in self.universals() | self.post.free_vars()}
        order: list[Var] = []
        seen: set[str] = set()
        for token in _IDENT.findall(f"{self.pre} {self.post}"):
            if token in variables and token not in seen:
                seen.add(token)
                order.append(variables[token])
        order += sorted((v for v in self.gamma if v.name not in seen), key=lambda v: v.name)
        renaming = Substitution({v: Var(f"%{i}", v.sort) for i, v in enumerate(order)})
        pre, post = self.pre.subst(renaming), self.post.subst(renaming)

        def renamed(vars_: frozenset[Var]) -> tuple[str, ...]:
            return tuple(sorted(str(renaming.get(v, v)) for v in vars_))

        return (
            renamed(self.gamma),
            renamed(self.existentials()),
            tuple(v.sort.value for v in order),
            str(pre),
            _tags(pre),
            str(post),
            _tags(post),
            self.calls,
        )

    def __str__(self) -> str:
        names = ", ".join(sorted(var_names(self.gamma)))
        return f"{{{names}}} {self.pre} ~> {self.post}"


def _tags(assertion: Assertion) -> tuple[int, ...]:
    return tuple(h.tag for h in assertion.spatial if isinstance(h, PredApp))


def over(expr: Expr, variables: frozenset[Var]) -> bool:
    return expr.free_vars() <= variables


def cell_at(heaplets: tuple, base: Expr, offset: int) -> PointsTo | None:
    for heaplet in heaplets:
        if isinstance(heaplet, PointsTo) and heaplet.base == base and heaplet.offset == offset:
            return heaplet
    return None


def separation_facts(pre: Assertion) -> list[Expr]:
    """
    Pure consequences of the precondition's spatial part: allocated bases
    are non-null and distinct cells at the same offset have distinct bases.
    """
    facts: list[Expr] = []
    rooted = [
        h
        for h in pre.spatial
        if isinstance(h, Block) or (isinstance(h, PointsTo) and h.offset == 0)
    ]
    for heaplet in rooted:
        if not isinstance(heaplet.base, IntConst):
            facts.append(neq(heaplet.base, IntConst(0)))
    cells = [h for h in pre.spatial if isinstance(h, PointsTo)]
    blocks = [h for h in pre.spatial if isinstance(h, Block)]
    for group in (cells, blocks):
        for left, right in combinations(group, 2):
            if isinstance(left, PointsTo) and isinstance(right, PointsTo):
                if left.offset != right.offset:
                    continue
            first, second = sorted((left.base, right.base), key=str)
            facts.append(neq(first, second))
    return facts


def missing_facts(pre: Assertion) -> list[Expr]:
    known = conjuncts(pre.pure)
    result: list[Expr] = []
    for fact in separation_facts(pre):
        flipped = _flip(fact)
        if fact not in known and flipped not in known and fact not in result:
            result.append(fact)
    return result


def _flip(fact: Expr) -> Expr:
    if isinstance(fact, Neg) and isinstance(fact.arg, BinOp):
        return neq(fact.arg.rhs, fact.arg.lhs)
    return fact


def duplicate_addresses(assertion: Assertion) -> bool:
    """Two heaplets claiming the same syntactic address cannot be disjoint."""
    seen: set[tuple] = set()
    for heaplet in assertion.spatial:
        if isinstance(heaplet, PointsTo):
            address: tuple = ("cell", heaplet.base, heaplet.offset)
        elif isinstance(heaplet, Block):
            address = ("block", heaplet.base)
        else:
            continue
        if address in seen:
            return True
        seen.add(address)
    return False
