"""
One-sided matching of pattern terms and heaplets against target ones.

Only existentials of the task bind; every other pattern variable must meet
the identical variable in the target.
"""
from __future__ import annotations

from typing import AbstractSet

from ..core import (
    BinOp,
    Block,
    Expr,
    Heaplet,
    Neg,
    PermConst,
    PointsTo,
    PredApp,
    SetLit,
    Sort,
    Substitution,
    Var,
    sort_of,
)
from ..core.terms import sorts_compatible


def perm_compatible(
    target_perm: Expr,
    pattern_perm: Expr,
    existentials: AbstractSet[Var],
) -> Substitution | None:
    """
    Binding that lets ``pattern_perm`` accept ``target_perm``, or None.

    An existential pattern permission accepts anything; a ``Mut`` pattern
    never accepts a borrow, so write access cannot be forged.
    """
    if isinstance(pattern_perm, Var) and pattern_perm in existentials:
        return Substitution({pattern_perm: target_perm})
    if pattern_perm == target_perm:
        return Substitution()
    return None


def _bind(var: Var, image: Expr, sigma: Substitution) -> Substitution | None:
    bound = sigma.get(var)
    if bound is not None:
        return sigma if bound == image else None
    if not sorts_compatible(var.sort, sort_of(image)):
        return None
    if isinstance(image, PermConst) and var.sort != Sort.PERM:
        return None
    return sigma.extend(var, image)


def match_term(
    pattern: Expr,
    target: Expr,
    existentials: AbstractSet[Var],
    sigma: Substitution,
) -> Substitution | None:
    if isinstance(pattern, Var):
        if pattern in existentials:
            return _bind(pattern, target, sigma)
        return sigma if pattern == target else None
    if isinstance(pattern, BinOp):
        if not (isinstance(target, BinOp) and target.op == pattern.op):
            return None
        step = match_term(pattern.lhs, target.lhs, existentials, sigma)
        if step is None:
            return None
        return match_term(pattern.rhs, target.rhs, existentials, step)
    if isinstance(pattern, Neg):
        if not isinstance(target, Neg):
            return None
        return match_term(pattern.arg, target.arg, existentials, sigma)
    if isinstance(pattern, SetLit):
        if not (isinstance(target, SetLit) and len(target.elems) == len(pattern.elems)):
            return None
        return match_all(pattern.elems, target.elems, existentials, sigma)
    return sigma if pattern == target else None


def match_all(
    patterns: tuple[Expr, ...],
    targets: tuple[Expr, ...],
    existentials: AbstractSet[Var],
    sigma: Substitution,
) -> Substitution | None:
    current: Substitution | None = sigma
    for pattern, target in zip(patterns, targets):
        current = match_term(pattern, target, existentials, current)
        if current is None:
            return None
    return current


def _match_perm(
    pattern: Expr,
    target: Expr,
    existentials: AbstractSet[Var],
    sigma: Substitution,
) -> Substitution | None:
    if isinstance(pattern, Var) and pattern in sigma:
        return sigma if sigma[pattern] == target else None
    binding = perm_compatible(target, pattern, existentials)
    if binding is None:
        return None
    for var, image in binding.items():
        sigma = sigma.extend(var, image)
    return sigma


def same_shape(pattern: Heaplet, target: Heaplet) -> bool:
    """Kind and arity agree: points-to at equal offset, blocks of equal size, same predicate."""
    if isinstance(pattern, PointsTo):
        return isinstance(target, PointsTo) and target.offset == pattern.offset
    if isinstance(pattern, Block):
        return isinstance(target, Block) and target.size == pattern.size
    return (
        isinstance(target, PredApp)
        and target.name == pattern.name
        and len(target.args) == len(pattern.args)
        and len(target.perms) == len(pattern.perms)
    )


def match_heaplet(
    pattern: Heaplet,
    target: Heaplet,
    existentials: AbstractSet[Var],
    sigma: Substitution,
    *,
    skip_value: bool = False,
    loose: bool = False,
) -> Substitution | None:
    """
    Extend ``sigma`` so that ``pattern`` becomes ``target``.

    ``skip_value`` leaves a points-to value unmatched; the caller is then
    responsible for establishing it with a store. ``loose`` skips predicate
    arguments without existentials; their equality is left to the caller.
    """
    if not same_shape(pattern, target):
        return None
    if isinstance(pattern, PointsTo):
        assert isinstance(target, PointsTo)
        step = match_term(pattern.base, target.base, existentials, sigma)
        if step is not None and not skip_value:
            step = match_term(pattern.value, target.value, existentials, step)
        if step is None:
            return None
        return _match_perm(pattern.perm, target.perm, existentials, step)
    if isinstance(pattern, Block):
        assert isinstance(target, Block)
        step = match_term(pattern.base, target.base, existentials, sigma)
        if step is None:
            return None
        return _match_perm(pattern.perm, target.perm, existentials, step)
    assert isinstance(target, PredApp)
    pairs = list(zip(pattern.args, target.args))
    if loose:
        pairs = [(p, t) for p, t in pairs if p.free_vars() & existentials]
    step = match_all(tuple(p for p, _ in pairs), tuple(t for _, t in pairs), existentials, sigma)
    for pattern_perm, target_perm in zip(pattern.perms, target.perms):
        if step is None:
            return None
        step = _match_perm(pattern_perm, target_perm, existentials, step)
    return step
