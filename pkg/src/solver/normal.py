"""
Formula normalization: simplification, negation normal form, bounded DNF and
equality extraction for the substitution rules.
"""
from __future__ import annotations

from typing import Callable

from ..core import (
    FALSE,
    TRUE,
    BinOp,
    BoolConst,
    Expr,
    Neg,
    Op,
    Sort,
    Var,
    conj,
    conjuncts,
    disj,
    evaluate,
    sort_of,
)


class TooManyCubes(Exception):
    pass


def _is_ground(expr: Expr) -> bool:
    return not expr.free_vars()


def _fold(expr: Expr) -> Expr:
    """Evaluate ground boolean terms to a constant."""
    if isinstance(expr, BoolConst) or not _is_ground(expr):
        return expr
    try:
        value = evaluate(expr, {})
    except (KeyError, TypeError):
        return expr
    if isinstance(value, bool):
        return TRUE if value else FALSE
    return expr


def simplify(formula: Expr) -> Expr:
    """
    Logically equivalent formula with ground parts folded, trivial
    conjuncts dropped, duplicates removed and ``p /\\ not p`` turned to false.
    """
    if isinstance(formula, BinOp) and formula.op == Op.AND:
        parts: list[Expr] = []
        for part in conjuncts(formula):
            simple = simplify(part)
            if simple == FALSE:
                return FALSE
            for item in conjuncts(simple):
                if item not in parts:
                    parts.append(item)
        for part in parts:
            negated = part.arg if isinstance(part, Neg) else Neg(part)
            if negated in parts:
                return FALSE
        return conj(parts)
    if isinstance(formula, BinOp) and formula.op == Op.OR:
        items: list[Expr] = []
        for part in (simplify(formula.lhs), simplify(formula.rhs)):
            if part == TRUE:
                return TRUE
            if part != FALSE and part not in items:
                items.append(part)
        return disj(items)
    if isinstance(formula, Neg):
        inner = simplify(formula.arg)
        if isinstance(inner, BoolConst):
            return FALSE if inner.value else TRUE
        if isinstance(inner, Neg):
            return inner.arg
        return Neg(inner)
    if isinstance(formula, BinOp) and formula.op in (Op.EQ, Op.LE):
        if formula.lhs == formula.rhs:
            return TRUE
    if isinstance(formula, BinOp) and formula.op == Op.LT and formula.lhs == formula.rhs:
        return FALSE
    return _fold(formula)


def _is_bool_eq(expr: Expr) -> bool:
    return (
        isinstance(expr, BinOp)
        and expr.op == Op.EQ
        and sort_of(expr.lhs) == Sort.BOOL
        and sort_of(expr.rhs) == Sort.BOOL
    )


def nnf(formula: Expr, positive: bool = True) -> Expr:
    """Negation normal form; negated orderings are flipped into orderings."""
    if isinstance(formula, BoolConst):
        return formula if positive else BoolConst(not formula.value)
    if isinstance(formula, Neg):
        return nnf(formula.arg, not positive)
    if isinstance(formula, BinOp) and formula.op in (Op.AND, Op.OR):
        left = nnf(formula.lhs, positive)
        right = nnf(formula.rhs, positive)
        is_and = (formula.op == Op.AND) == positive
        return BinOp(Op.AND if is_and else Op.OR, left, right)
    if _is_bool_eq(formula):
        both = BinOp(Op.AND, formula.lhs, formula.rhs)
        neither = BinOp(Op.AND, Neg(formula.lhs), Neg(formula.rhs))
        return nnf(BinOp(Op.OR, both, neither), positive)
    if positive:
        return formula
    if isinstance(formula, BinOp) and formula.op == Op.LE:
        return BinOp(Op.LT, formula.rhs, formula.lhs)
    if isinstance(formula, BinOp) and formula.op == Op.LT:
        return BinOp(Op.LE, formula.rhs, formula.lhs)
    return Neg(formula)


def dnf(formula: Expr, max_cubes: int) -> list[list[Expr]]:
    """Cubes of literals for an NNF formula; raises TooManyCubes past the cap."""
    if isinstance(formula, BoolConst):
        return [[]] if formula.value else []
    if isinstance(formula, BinOp) and formula.op == Op.OR:
        cubes = dnf(formula.lhs, max_cubes) + dnf(formula.rhs, max_cubes)
        if len(cubes) > max_cubes:
            raise TooManyCubes(f"{len(cubes)} cubes")
        return cubes
    if isinstance(formula, BinOp) and formula.op == Op.AND:
        left = dnf(formula.lhs, max_cubes)
        right = dnf(formula.rhs, max_cubes)
        if len(left) * len(right) > max_cubes:
            raise TooManyCubes(f"{len(left) * len(right)} cubes")
        return [a + b for a in left for b in right]
    return [[formula]]


def extract_equalities(
    formula: Expr,
    eligible: Callable[[Var], bool] | None = None,
) -> list[tuple[Var, Expr]]:
    """
    Top-level conjuncts ``v == t`` oriented as (v, t), with ``v`` eligible and
    not occurring in ``t``. The left-hand variable is tried first.
    """
    allowed = eligible or (lambda var: True)
    result: list[tuple[Var, Expr]] = []
    for part in conjuncts(formula):
        if not (isinstance(part, BinOp) and part.op == Op.EQ):
            continue
        for var, term in ((part.lhs, part.rhs), (part.rhs, part.lhs)):
            if isinstance(var, Var) and allowed(var) and var not in term.free_vars():
                result.append((var, term))
                break
    return result
