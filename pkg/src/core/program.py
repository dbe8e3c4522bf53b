"""
Imperative target language produced by synthesis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .terms import Expr, Var


@dataclass(frozen=True)
class Load:
    """``let var = *(base + offset);``"""

    var: str
    base: Expr
    offset: int


@dataclass(frozen=True)
class Store:
    """``*(base + offset) = value;``"""

    base: Expr
    offset: int
    value: Expr


@dataclass(frozen=True)
class Malloc:
    var: str
    size: int


@dataclass(frozen=True)
class Free:
    target: Expr


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Statement
    orelse: Statement


@dataclass(frozen=True)
class Seq:
    stmts: tuple[Statement, ...]


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Error:
    pass


Statement = Load | Store | Malloc | Free | Call | If | Seq | Skip | Error

SKIP = Skip()


def seq(*stmts: Statement) -> Statement:
    """Sequence with nested sequences flattened and skips dropped."""
    flat: list[Statement] = []
    for stmt in stmts:
        if isinstance(stmt, Seq):
            flat.extend(stmt.stmts)
        elif not isinstance(stmt, Skip):
            flat.append(stmt)
    if not flat:
        return SKIP
    if len(flat) == 1:
        return flat[0]
    return Seq(tuple(flat))


@dataclass(frozen=True)
class Procedure:
    name: str
    formals: tuple[Var, ...]
    body: Statement

    @property
    def formal_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.formals)


def iter_statements(stmt: Statement) -> Iterable[Statement]:
    """Pre-order walk over every statement node."""
    yield stmt
    if isinstance(stmt, Seq):
        for child in stmt.stmts:
            yield from iter_statements(child)
    elif isinstance(stmt, If):
        yield from iter_statements(stmt.then)
        yield from iter_statements(stmt.orelse)
