"""
Symbolic heaps and assertions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .terms import MUT, TRUE, Expr, Var, conj, conjuncts, format_expr


@dataclass(frozen=True)
class PointsTo:
    """``<base, offset> :-> value`` annotated with ``perm``."""

    base: Expr
    offset: int
    value: Expr
    perm: Expr = MUT

    def free_vars(self) -> frozenset[Var]:
        return self.base.free_vars() | self.value.free_vars() | self.perm.free_vars()

    def subst(self, mapping: Mapping[Var, Expr]) -> PointsTo:
        return PointsTo(
            self.base.subst(mapping),
            self.offset,
            self.value.subst(mapping),
            self.perm.subst(mapping),
        )

    def with_perm(self, perm: Expr) -> PointsTo:
        return PointsTo(self.base, self.offset, self.value, perm)

    def __str__(self) -> str:
        loc = format_expr(self.base)
        if self.offset:
            loc = f"({loc} + {self.offset})"
        return f"{loc} :-> {_value(self.value)}{_annot(self.perm)}"


@dataclass(frozen=True)
class Block:
    """Record of ``size`` cells allocated at ``base``."""

    base: Expr
    size: int
    perm: Expr = MUT

    def free_vars(self) -> frozenset[Var]:
        return self.base.free_vars() | self.perm.free_vars()

    def subst(self, mapping: Mapping[Var, Expr]) -> Block:
        return Block(self.base.subst(mapping), self.size, self.perm.subst(mapping))

    def with_perm(self, perm: Expr) -> Block:
        return Block(self.base, self.size, perm)

    def __str__(self) -> str:
        return f"[{format_expr(self.base)}, {self.size}]{_annot(self.perm)}"


@dataclass(frozen=True)
class PredApp:
    """
    Predicate instance. ``tag`` is search bookkeeping and takes no part in
    equality: unfold depth in a precondition, close depth in a postcondition.
    """

    name: str
    args: tuple[Expr, ...]
    perms: tuple[Expr, ...] = ()
    tag: int = field(default=0, compare=False, repr=False)

    def free_vars(self) -> frozenset[Var]:
        result: frozenset[Var] = frozenset()
        for term in self.args + self.perms:
            result = result | term.free_vars()
        return result

    def subst(self, mapping: Mapping[Var, Expr]) -> PredApp:
        return PredApp(
            self.name,
            tuple(a.subst(mapping) for a in self.args),
            tuple(p.subst(mapping) for p in self.perms),
            self.tag,
        )

    def with_perms(self, perms: tuple[Expr, ...]) -> PredApp:
        return PredApp(self.name, self.args, perms, self.tag)

    def with_tag(self, tag: int) -> PredApp:
        return PredApp(self.name, self.args, self.perms, tag)

    def __str__(self) -> str:
        args = ", ".join(format_expr(a) for a in self.args)
        text = f"{self.name}({args})"
        if self.perms:
            text += "<" + ", ".join(format_expr(p) for p in self.perms) + ">"
        return text


Heaplet = PointsTo | Block | PredApp

_KIND_RANK = {Block: 0, PointsTo: 1, PredApp: 2}


def kind_rank(heaplet: Heaplet) -> int:
    """Unification cost: block < points-to < predicate."""
    return _KIND_RANK[type(heaplet)]


def heaplet_key(heaplet: Heaplet) -> tuple:
    """Canonical order: kind, then base, then offset."""
    if isinstance(heaplet, PredApp):
        base = format_expr(heaplet.args[0]) if heaplet.args else ""
        return (2, heaplet.name, base, 0, str(heaplet))
    offset = heaplet.offset if isinstance(heaplet, PointsTo) else 0
    return (kind_rank(heaplet), "", format_expr(heaplet.base), offset, str(heaplet))


def heaplet_perm(heaplet: Heaplet) -> tuple[Expr, ...]:
    if isinstance(heaplet, PredApp):
        return heaplet.perms
    return (heaplet.perm,)


def _value(expr: Expr) -> str:
    text = format_expr(expr)
    return text if " " not in text else f"({text})"


def _annot(perm: Expr) -> str:
    return "" if perm == MUT else f"<{format_expr(perm)}>"


@dataclass(frozen=True)
class Assertion:
    """``{pure ; spatial}``; spatial is a multiset kept in canonical order."""

    pure: Expr
    spatial: tuple[Heaplet, ...] = ()

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.spatial, key=heaplet_key))
        object.__setattr__(self, "spatial", ordered)

    @classmethod
    def of(cls, pure: Expr, heaplets: Iterable[Heaplet]) -> Assertion:
        return cls(conj([pure]), tuple(heaplets))

    def free_vars(self) -> frozenset[Var]:
        result = self.pure.free_vars()
        for heaplet in self.spatial:
            result = result | heaplet.free_vars()
        return result

    def subst(self, mapping: Mapping[Var, Expr]) -> Assertion:
        if not mapping:
            return self
        return Assertion(
            conj(c.subst(mapping) for c in conjuncts(self.pure)),
            tuple(h.subst(mapping) for h in self.spatial),
        )

    def with_pure(self, pure: Expr) -> Assertion:
        return Assertion(pure, self.spatial)

    def with_spatial(self, heaplets: Iterable[Heaplet]) -> Assertion:
        return Assertion(self.pure, tuple(heaplets))

    def add_pure(self, *extra: Expr) -> Assertion:
        return Assertion(conj([self.pure, *extra]), self.spatial)

    def remove(self, heaplet: Heaplet) -> Assertion:
        items = list(self.spatial)
        items.remove(heaplet)
        return Assertion(self.pure, tuple(items))

    def is_emp(self) -> bool:
        return not self.spatial

    def __str__(self) -> str:
        heap = " ** ".join(str(h) for h in self.spatial) or "emp"
        return "{" + f"{format_expr(self.pure)} ; {heap}" + "}"


def emp(pure: Expr | None = None) -> Assertion:
    return Assertion(pure if pure is not None else TRUE, ())
