"""
Pure logic terms: sorts, expressions and permissions.

Permissions are ordinary expressions of sort ``perm``: the constants
``Mut``/``Imm`` or a borrow variable ``Var(name, Sort.PERM)``. Keeping them in
the same term language lets one substitution instantiate values and
annotations at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping


class Sort(str, Enum):
    LOC = "loc"
    INT = "int"
    BOOL = "bool"
    SET = "set"
    PERM = "perm"

    @property
    def numeric(self) -> bool:
        return self in (Sort.LOC, Sort.INT)


def sorts_compatible(left: Sort, right: Sort) -> bool:
    """Locations are a subset of values, so loc and int mix freely."""
    return left == right or (left.numeric and right.numeric)


class Op(str, Enum):
    PLUS = "+"
    MINUS = "-"
    EQ = "=="
    LE = "<="
    LT = "<"
    AND = "/\\"
    OR = "\\/"
    UNION = "++"


ARITH_OPS = frozenset({Op.PLUS, Op.MINUS})
COMPARE_OPS = frozenset({Op.EQ, Op.LE, Op.LT})
LOGIC_OPS = frozenset({Op.AND, Op.OR})


class Expr:
    """Base class of all pure terms."""

    __slots__ = ()

    def free_vars(self) -> frozenset[Var]:
        raise NotImplementedError

    def subst(self, mapping: Mapping[Var, Expr]) -> Expr:
        raise NotImplementedError

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True, repr=False)
class IntConst(Expr):
    value: int

    def free_vars(self) -> frozenset[Var]:
        return frozenset()

    def subst(self, mapping: Mapping[Var, Expr]) -> Expr:
        return self

    def __repr__(self) -> str:
        return f"IntConst({self.value})"


@dataclass(frozen=True, repr=False)
class BoolConst(Expr):
    value: bool

    def free_vars(self) -> frozenset[Var]:
        return frozenset()

    def subst(self, mapping: Mapping[Var, Expr]) -> Expr:
        return self

    def __repr__(self) -> str:
        return f"BoolConst({self.value})"


@dataclass(frozen=True, repr=False)
class Var(Expr):
    """A logical or program variable. Identity is the name alone."""

    name: str
    sort: Sort = field(default=Sort.INT, compare=False)

    def free_vars(self) -> frozenset[Var]:
        return frozenset({self})

    def subst(self, mapping: Mapping[Var, Expr]) -> Expr:
        return mapping.get(self, self)

    def __repr__(self) -> str:
        return f"Var({self.name!r}, {self.sort.value})"


@dataclass(frozen=True, repr=False)
class SetLit(Expr):
    elems: tuple[Expr, ...]

    def free_vars(self) -> frozenset[Var]:
        return _union_vars(self.elems)

    def subst(self, mapping: Mapping[Var, Expr]) -> Expr:
        return SetLit(tuple(e.subst(mapping) for e in self.elems))

    def __repr__(self) -> str:
        return f"SetLit({list(self.elems)!r})"


@dataclass(frozen=True, repr=False)
class BinOp(Expr):
    op: Op
    lhs: Expr
    rhs: Expr

    def free_vars(self) -> frozenset[Var]:
        return self.lhs.free_vars() | self.rhs.free_vars()

    def subst(self, mapping: Mapping[Var, Expr]) -> Expr:
        return BinOp(self.op, self.lhs.subst(mapping), self.rhs.subst(mapping))

    def __repr__(self) -> str:
        return f"BinOp({self.op.value!r}, {self.lhs!r}, {self.rhs!r})"


@dataclass(frozen=True, repr=False)
class Neg(Expr):
    arg: Expr

    def free_vars(self) -> frozenset[Var]:
        return self.arg.free_vars()

    def subst(self, mapping: Mapping[Var, Expr]) -> Expr:
        return Neg(self.arg.subst(mapping))

    def __repr__(self) -> str:
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, repr=False)
class PermConst(Expr):
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ("Mut", "Imm"):
            raise ValueError(f"Unknown permission constant: {self.kind!r}")

    def free_vars(self) -> frozenset[Var]:
        return frozenset()

    def subst(self, mapping: Mapping[Var, Expr]) -> Expr:
        return self

    def __repr__(self) -> str:
        return self.kind


MUT = PermConst("Mut")
IMM = PermConst("Imm")
TRUE = BoolConst(True)
FALSE = BoolConst(False)

# A heaplet annotation: MUT, IMM or a perm-sorted Var.
Permission = Expr


def borrow(name: str) -> Var:
    return Var(name, Sort.PERM)


def is_borrow(perm: Expr) -> bool:
    return isinstance(perm, Var) and perm.sort == Sort.PERM


def _union_vars(exprs: Iterable[Expr]) -> frozenset[Var]:
    result: frozenset[Var] = frozenset()
    for expr in exprs:
        result = result | expr.free_vars()
    return result


def sort_of(expr: Expr) -> Sort:
    if isinstance(expr, IntConst):
        return Sort.INT
    if isinstance(expr, BoolConst):
        return Sort.BOOL
    if isinstance(expr, Var):
        return expr.sort
    if isinstance(expr, SetLit):
        return Sort.SET
    if isinstance(expr, PermConst):
        return Sort.PERM
    if isinstance(expr, Neg):
        return Sort.BOOL
    if isinstance(expr, BinOp):
        if expr.op in ARITH_OPS:
            return Sort.INT
        if expr.op == Op.UNION:
            return Sort.SET
        return Sort.BOOL
    raise TypeError(f"Not an expression: {expr!r}")


# --- construction helpers ---------------------------------------------------

def eq(lhs: Expr, rhs: Expr) -> Expr:
    return BinOp(Op.EQ, lhs, rhs)


def neq(lhs: Expr, rhs: Expr) -> Expr:
    return Neg(BinOp(Op.EQ, lhs, rhs))


def plus(base: Expr, offset: int) -> Expr:
    if offset == 0:
        return base
    return BinOp(Op.PLUS, base, IntConst(offset))


def conjuncts(formula: Expr) -> list[Expr]:
    """Flatten nested conjunctions, dropping literal ``true``."""
    if isinstance(formula, BinOp) and formula.op == Op.AND:
        return conjuncts(formula.lhs) + conjuncts(formula.rhs)
    if formula == TRUE:
        return []
    return [formula]


def conj(parts: Iterable[Expr]) -> Expr:
    items = [p for part in parts for p in conjuncts(part)]
    if not items:
        return TRUE
    result = items[0]
    for item in items[1:]:
        result = BinOp(Op.AND, result, item)
    return result


def disj(parts: Iterable[Expr]) -> Expr:
    items = list(parts)
    if not items:
        return FALSE
    result = items[0]
    for item in items[1:]:
        result = BinOp(Op.OR, result, item)
    return result


# --- printing ---------------------------------------------------------------

_PREC = {
    Op.OR: 1,
    Op.AND: 2,
    Op.EQ: 4,
    Op.LE: 4,
    Op.LT: 4,
    Op.PLUS: 5,
    Op.MINUS: 5,
    Op.UNION: 5,
}
_NOT_PREC = 3
_ATOM_PREC = 6


def _prec(expr: Expr) -> int:
    if isinstance(expr, BinOp):
        return _PREC[expr.op]
    if isinstance(expr, Neg):
        return _NOT_PREC
    return _ATOM_PREC


def format_expr(expr: Expr) -> str:
    """Concrete syntax accepted back by the spec parser."""
    if isinstance(expr, IntConst):
        return str(expr.value)
    if isinstance(expr, BoolConst):
        return "true" if expr.value else "false"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, PermConst):
        return expr.kind
    if isinstance(expr, SetLit):
        return "{" + ", ".join(format_expr(e) for e in expr.elems) + "}"
    if isinstance(expr, Neg):
        inner = format_expr(expr.arg)
        if _prec(expr.arg) < _ATOM_PREC:
            inner = f"({inner})"
        return f"not {inner}"
    if isinstance(expr, BinOp):
        level = _PREC[expr.op]
        left = format_expr(expr.lhs)
        right = format_expr(expr.rhs)
        if expr.op in COMPARE_OPS:
            if _prec(expr.lhs) <= level:
                left = f"({left})"
            if _prec(expr.rhs) <= level:
                right = f"({right})"
        else:
            if _prec(expr.lhs) < level:
                left = f"({left})"
            if _prec(expr.rhs) <= level:
                right = f"({right})"
        return f"{left} {expr.op.value} {right}"
    raise TypeError(f"Not an expression: {expr!r}")
