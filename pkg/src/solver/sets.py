"""
Finite-set reasoning for unions of set variables and element literals.

Set variables defined by an equality are substituted away; what remains is
put in a canonical union form (element terms, variable names).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable

from ..core import BinOp, Expr, Op, SetLit, Sort, Var


class SetConflict(Exception):
    pass


@dataclass(frozen=True)
class UnionForm:
    elems: tuple[Expr, ...]
    vars: tuple[str, ...]

    def is_empty_literal(self) -> bool:
        return not self.elems and not self.vars

    def to_expr(self) -> Expr:
        parts: list[Expr] = []
        if self.elems or not self.vars:
            parts.append(SetLit(self.elems))
        parts += [Var(name, Sort.SET) for name in self.vars]
        result = parts[0]
        for part in parts[1:]:
            result = BinOp(Op.UNION, result, part)
        return result


def union_form(term: Expr) -> UnionForm | None:
    """None for terms outside the union-of-literals-and-variables fragment."""
    if isinstance(term, Var):
        return UnionForm((), (term.name,))
    if isinstance(term, SetLit):
        return UnionForm(term.elems, ())
    if isinstance(term, BinOp) and term.op == Op.UNION:
        left = union_form(term.lhs)
        right = union_form(term.rhs)
        if left is None or right is None:
            return None
        names = tuple(sorted(set(left.vars) | set(right.vars)))
        return UnionForm(left.elems + right.elems, names)
    return None


def canonical_key(form: UnionForm, element_key: Callable[[Expr], Hashable]) -> tuple:
    """Equal keys imply equal sets under any model of the element equalities."""
    return (frozenset(element_key(e) for e in form.elems), frozenset(form.vars))


class SetConstraints:
    """
    Equalities and disequalities between set terms.

    ``eliminate`` substitutes variables defined by equalities and empties the
    variables of unions equated to ``{}``; it raises ``SetConflict`` when a
    non-empty literal is equated to ``{}``.
    """

    def __init__(self) -> None:
        self.equalities: list[tuple[Expr, Expr]] = []
        self.disequalities: list[tuple[Expr, Expr]] = []
        # eliminated variable -> defining term over the remaining variables
        self.definitions: dict[Var, Expr] = {}
        self.element_equalities: list[tuple[Expr, Expr]] = []

    def add_eq(self, left: Expr, right: Expr) -> None:
        self.equalities.append((left, right))

    def add_ne(self, left: Expr, right: Expr) -> None:
        self.disequalities.append((left, right))

    def _substitute(self, var: Var, image: Expr) -> None:
        mapping = {var: image}
        for key in list(self.definitions):
            self.definitions[key] = self.definitions[key].subst(mapping)
        self.definitions[var] = image
        self.equalities = [(a.subst(mapping), b.subst(mapping)) for a, b in self.equalities]
        self.disequalities = [(a.subst(mapping), b.subst(mapping)) for a, b in self.disequalities]

    def eliminate(self) -> None:
        changed = True
        while changed:
            changed = False
            for index, (left, right) in enumerate(self.equalities):
                step = self._eliminate_one(left, right)
                if step is None:
                    continue
                del self.equalities[index]
                for var, image in step:
                    self._substitute(var, image)
                changed = True
                break
        self._singletons()

    def _eliminate_one(self, left: Expr, right: Expr) -> list[tuple[Var, Expr]] | None:
        lform, rform = union_form(left), union_form(right)
        if lform is None or rform is None:
            return None
        for form, other, other_term in ((lform, rform, right), (rform, lform, left)):
            if not form.elems and len(form.vars) == 1 and form.vars[0] not in other.vars:
                return [(Var(form.vars[0], Sort.SET), other_term)]
        for form, other in ((lform, rform), (rform, lform)):
            if form.is_empty_literal():
                if other.elems:
                    raise SetConflict(f"{left} == {right}")
                if other.vars:
                    return [(Var(name, Sort.SET), SetLit(())) for name in other.vars]
                return []
        return None

    def _singletons(self) -> None:
        """``{a, b} == {c}`` forces every element on the left to equal ``c``."""
        for left, right in self.equalities:
            lform, rform = union_form(left), union_form(right)
            if lform is None or rform is None:
                continue
            for form, other in ((lform, rform), (rform, lform)):
                if not form.vars and len(form.elems) == 1 and not other.vars:
                    for elem in other.elems:
                        self.element_equalities.append((elem, form.elems[0]))

    def check(self, element_key: Callable[[Expr], Hashable]) -> None:
        """Conflicts visible on canonical forms."""
        for left, right in self.disequalities:
            lform, rform = union_form(left), union_form(right)
            if lform is None or rform is None:
                continue
            if canonical_key(lform, element_key) == canonical_key(rform, element_key):
                raise SetConflict(f"{left} != {right}")
        for left, right in self.equalities:
            lform, rform = union_form(left), union_form(right)
            if lform is None or rform is None:
                continue
            for form, other in ((lform, rform), (rform, lform)):
                if form.is_empty_literal() and other.elems:
                    raise SetConflict(f"{left} == {right}")

    def residual_vars(self) -> set[str]:
        names: set[str] = set()
        for left, right in self.equalities + self.disequalities:
            for term in (left, right):
                names |= {v.name for v in term.free_vars() if v.sort == Sort.SET}
        return names
