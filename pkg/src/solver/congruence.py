"""
Congruence closure over pure terms.

Constants (integers, booleans, permissions) are pairwise distinct; compound
terms are congruent when their operators agree and their arguments are in
the same classes.
"""
from __future__ import annotations

from ..core import BinOp, BoolConst, Expr, IntConst, Neg, PermConst, SetLit


class CongruenceConflict(Exception):
    pass


def _children(term: Expr) -> tuple[Expr, ...]:
    if isinstance(term, BinOp):
        return (term.lhs, term.rhs)
    if isinstance(term, Neg):
        return (term.arg,)
    if isinstance(term, SetLit):
        return term.elems
    return ()


def _label(term: Expr) -> object:
    if isinstance(term, BinOp):
        return ("op", term.op)
    if isinstance(term, Neg):
        return ("not",)
    if isinstance(term, SetLit):
        return ("set", len(term.elems))
    return None


def _is_constant(term: Expr) -> bool:
    return isinstance(term, (IntConst, BoolConst, PermConst))


class CongruenceClosure:
    def __init__(self) -> None:
        self._parent: dict[Expr, Expr] = {}
        self._uses: dict[Expr, list[Expr]] = {}
        self._constant: dict[Expr, Expr] = {}
        self._disequal: list[tuple[Expr, Expr]] = []

    def add(self, term: Expr) -> Expr:
        if term in self._parent:
            return self.find(term)
        self._parent[term] = term
        self._uses[term] = []
        if _is_constant(term):
            self._constant[term] = term
        for child in _children(term):
            self._uses[self.add(child)].append(term)
        # a new compound term may already be congruent to an existing one
        for other in list(self._parent):
            if other is not term and self._congruent(term, other):
                self.merge(term, other)
                break
        return self.find(term)

    def find(self, term: Expr) -> Expr:
        root = term
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[term] != root:
            self._parent[term], term = root, self._parent[term]
        return root

    def _congruent(self, left: Expr, right: Expr) -> bool:
        label = _label(left)
        if label is None or label != _label(right):
            return False
        return all(
            self.find(a) == self.find(b) for a, b in zip(_children(left), _children(right))
        )

    def merge(self, left: Expr, right: Expr) -> None:
        pending = [(self.add(left), self.add(right))]
        while pending:
            a, b = pending.pop()
            root_a, root_b = self.find(a), self.find(b)
            if root_a == root_b:
                continue
            const_a = self._constant.get(root_a)
            const_b = self._constant.get(root_b)
            if const_a is not None and const_b is not None and const_a != const_b:
                raise CongruenceConflict(f"{const_a} == {const_b}")
            uses_a = self._uses.pop(root_a)
            self._parent[root_a] = root_b
            if const_a is not None:
                self._constant[root_b] = const_a
            for use in uses_a:
                for other in self._uses[root_b]:
                    if self._congruent(use, other):
                        pending.append((use, other))
            self._uses[root_b].extend(uses_a)
        self._check_disequalities()

    def assert_distinct(self, left: Expr, right: Expr) -> None:
        self.add(left)
        self.add(right)
        self._disequal.append((left, right))
        self._check_disequalities()

    def _check_disequalities(self) -> None:
        for left, right in self._disequal:
            if self.find(left) == self.find(right):
                raise CongruenceConflict(f"{left} != {right}")

    def same(self, left: Expr, right: Expr) -> bool:
        return self.find(self.add(left)) == self.find(self.add(right))

    def constant_of(self, term: Expr) -> Expr | None:
        return self._constant.get(self.find(self.add(term)))

    def classes(self) -> list[list[Expr]]:
        groups: dict[Expr, list[Expr]] = {}
        for term in self._parent:
            groups.setdefault(self.find(term), []).append(term)
        return list(groups.values())
