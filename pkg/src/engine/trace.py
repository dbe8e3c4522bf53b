"""
Permission discipline checks over a finished derivation.

``check_trace`` reports two kinds of violations:

* strengthening: a location annotated with a borrow in some goal appears
  with ``Mut`` in a descendant goal;
* unreturned borrow: a heaplet handed to a callee does not come back with
  its annotation, unless it was fully mutable and the callee disposed of it.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..core import MUT, Block, Expr, Heaplet, PointsTo, format_expr, is_borrow
from ..core.heap import heaplet_perm
from .search import Derivation


@dataclass(frozen=True)
class TraceViolation:
    kind: str
    location: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} at {self.location}: {self.detail}"


def location(heaplet: Heaplet) -> tuple:
    if isinstance(heaplet, PointsTo):
        return ("cell", format_expr(heaplet.base), heaplet.offset)
    if isinstance(heaplet, Block):
        return ("block", format_expr(heaplet.base))
    root = format_expr(heaplet.args[0]) if heaplet.args else heaplet.name
    return ("pred", root)


def _show(loc: tuple) -> str:
    return " ".join(str(part) for part in loc)


def check_trace(root: Derivation) -> list[TraceViolation]:
    violations: list[TraceViolation] = []
    _strengthening(root, {}, violations)
    for node in root.nodes():
        if node.rule == "Call":
            violations += _unreturned(node)
    return violations


def _strengthening(
    node: Derivation,
    borrowed: dict[tuple, tuple[Expr, ...]],
    violations: list[TraceViolation],
) -> None:
    for heaplet in node.goal.pre.spatial:
        loc = location(heaplet)
        earlier = borrowed.get(loc)
        if earlier is None:
            continue
        for before, now in zip(earlier, heaplet_perm(heaplet)):
            if is_borrow(before) and now == MUT:
                violations.append(
                    TraceViolation(
                        "strengthening",
                        _show(loc),
                        f"{format_expr(before)} became Mut in {heaplet}",
                    )
                )
    scope = dict(borrowed)
    for heaplet in node.goal.pre.spatial:
        perms = heaplet_perm(heaplet)
        if any(is_borrow(p) for p in perms):
            scope[location(heaplet)] = perms
    for child in node.children:
        _strengthening(child, scope, violations)


def _unreturned(node: Derivation) -> list[TraceViolation]:
    if not node.children:
        return []
    after = {location(h): heaplet_perm(h) for h in node.children[0].goal.pre.spatial}
    violations: list[TraceViolation] = []
    for heaplet in node.consumed:
        perms = heaplet_perm(heaplet)
        loc = location(heaplet)
        back = after.get(loc)
        if back is None:
            if all(p == MUT for p in perms):
                continue
            detail = f"{heaplet} not returned by {node.description}"
        elif back != perms:
            detail = f"{heaplet} returned with <{', '.join(format_expr(p) for p in back)}>"
        else:
            continue
        violations.append(TraceViolation("unreturned borrow", _show(loc), detail))
    return violations
