"""
Reference evaluator for pure terms under a concrete valuation.

Values: ``int`` for int/loc, ``bool``, ``frozenset[int]`` for sets and the
strings ``"Mut"``/``"Imm"`` for permissions.
"""
from __future__ import annotations

from typing import Mapping, Union

from .terms import BinOp, BoolConst, Expr, IntConst, Neg, Op, PermConst, SetLit, Var

Value = Union[int, bool, frozenset, str]


def evaluate(expr: Expr, env: Mapping[str, Value]) -> Value:
    """
    Raises:
        KeyError: a free variable of ``expr`` is missing from ``env``
        TypeError: the term is ill-sorted under ``env``
    """
    if isinstance(expr, IntConst):
        return expr.value
    if isinstance(expr, BoolConst):
        return expr.value
    if isinstance(expr, PermConst):
        return expr.kind
    if isinstance(expr, Var):
        if expr.name not in env:
            raise KeyError(expr.name)
        return env[expr.name]
    if isinstance(expr, SetLit):
        return frozenset(_as_int(evaluate(e, env)) for e in expr.elems)
    if isinstance(expr, Neg):
        return not _as_bool(evaluate(expr.arg, env))
    if isinstance(expr, BinOp):
        return _binop(expr, env)
    raise TypeError(f"Not an expression: {expr!r}")


def _binop(expr: BinOp, env: Mapping[str, Value]) -> Value:
    op = expr.op
    if op == Op.AND:
        return _as_bool(evaluate(expr.lhs, env)) and _as_bool(evaluate(expr.rhs, env))
    if op == Op.OR:
        return _as_bool(evaluate(expr.lhs, env)) or _as_bool(evaluate(expr.rhs, env))
    left = evaluate(expr.lhs, env)
    right = evaluate(expr.rhs, env)
    if op == Op.EQ:
        return left == right
    if op == Op.PLUS:
        return _as_int(left) + _as_int(right)
    if op == Op.MINUS:
        return _as_int(left) - _as_int(right)
    if op == Op.LE:
        return _as_int(left) <= _as_int(right)
    if op == Op.LT:
        return _as_int(left) < _as_int(right)
    if op == Op.UNION:
        return _as_set(left) | _as_set(right)
    raise TypeError(f"Unknown operator: {op}")


def _as_int(value: Value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"Expected an integer, got {value!r}")
    return value


def _as_bool(value: Value) -> bool:
    if not isinstance(value, bool):
        raise TypeError(f"Expected a boolean, got {value!r}")
    return value


def _as_set(value: Value) -> frozenset:
    if not isinstance(value, frozenset):
        raise TypeError(f"Expected a set, got {value!r}")
    return value


def holds(formula: Expr, env: Mapping[str, Value]) -> bool:
    return _as_bool(evaluate(formula, env))
