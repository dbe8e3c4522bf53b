"""
Predicate definitions, function specifications and synthesis goals.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .heap import Assertion, Heaplet, PredApp
from .terms import Expr, Sort, Var


@dataclass(frozen=True)
class PredClause:
    """``selector => {pure ; spatial}``"""

    selector: Expr
    body: Assertion

    def free_vars(self) -> frozenset[Var]:
        return self.selector.free_vars() | self.body.free_vars()


@dataclass(frozen=True)
class PredicateDef:
    name: str
    params: tuple[Var, ...]
    perm_params: tuple[Var, ...]
    clauses: tuple[PredClause, ...]

    @property
    def arity(self) -> int:
        return len(self.params)

    def clause_locals(self, clause: PredClause) -> frozenset[Var]:
        bound = set(self.params) | set(self.perm_params)
        return frozenset(v for v in clause.free_vars() if v not in bound)

    def instantiate(
        self,
        clause: PredClause,
        app: PredApp,
        renaming: Mapping[Var, Expr],
    ) -> tuple[Expr, Assertion]:
        """Selector and body of ``clause`` for the instance ``app``."""
        mapping: dict[Var, Expr] = dict(renaming)
        mapping.update(zip(self.params, app.args))
        mapping.update(zip(self.perm_params, app.perms))
        return clause.selector.subst(mapping), clause.body.subst(mapping)


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    formals: tuple[Var, ...]
    pre: Assertion
    post: Assertion

    def existentials(self) -> frozenset[Var]:
        return self.post.free_vars() - set(self.formals) - self.pre.free_vars()

    def ghosts(self) -> frozenset[Var]:
        return self.pre.free_vars() - set(self.formals)


@dataclass(frozen=True)
class Context:
    """Sigma: predicate definitions and callable function specs by name."""

    predicates: Mapping[str, PredicateDef] = field(default_factory=dict)
    functions: Mapping[str, FunctionSpec] = field(default_factory=dict)

    def with_function(self, spec: FunctionSpec) -> Context:
        functions = dict(self.functions)
        functions[spec.name] = spec
        return Context(self.predicates, functions)

    def predicate(self, name: str) -> PredicateDef:
        if name not in self.predicates:
            raise KeyError(f"Unknown predicate: {name}")
        return self.predicates[name]


@dataclass(frozen=True)
class SynthGoal:
    gamma: frozenset[Var]
    pre: Assertion
    post: Assertion
    sigma: Context

    def ghosts(self) -> frozenset[Var]:
        return self.pre.free_vars() - self.gamma

    def existentials(self) -> frozenset[Var]:
        return existentials(self)


def existentials(goal: SynthGoal) -> frozenset[Var]:
    """vars(post) minus gamma minus vars(pre)."""
    return goal.post.free_vars() - goal.gamma - goal.pre.free_vars()


def goal_of(spec: FunctionSpec, sigma: Context) -> SynthGoal:
    return SynthGoal(frozenset(spec.formals), spec.pre, spec.post, sigma)


_TRAILING_DIGITS = re.compile(r"\d+$")


def fresh_name(base: str, used: Iterable[str]) -> str:
    """``base`` itself when free, else the stem with the smallest free suffix."""
    taken = set(used)
    if base not in taken:
        return base
    stem = _TRAILING_DIGITS.sub("", base) or base
    index = 1
    while f"{stem}{index}" in taken:
        index += 1
    return f"{stem}{index}"


def fresh_var(var: Var, used: Iterable[str]) -> Var:
    return Var(fresh_name(var.name, used), var.sort)


def var_names(vars_: Iterable[Var]) -> set[str]:
    return {v.name for v in vars_}


def heaplets_vars(heaplets: Iterable[Heaplet]) -> frozenset[Var]:
    result: frozenset[Var] = frozenset()
    for heaplet in heaplets:
        result = result | heaplet.free_vars()
    return result


def perm_vars(vars_: Iterable[Var]) -> frozenset[Var]:
    return frozenset(v for v in vars_ if v.sort == Sort.PERM)


def classify_vars(goal: SynthGoal) -> tuple[frozenset[Var], frozenset[Var], frozenset[Var]]:
    """(program variables, ghosts, existentials) of ``goal``."""
    return goal.gamma, goal.ghosts(), goal.existentials()
