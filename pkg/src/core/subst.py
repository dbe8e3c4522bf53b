"""
Substitutions over logical variables of every sort, permissions included.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Mapping, TypeVar

from .context import PredClause
from .heap import Assertion, Block, PointsTo, PredApp
from .terms import Expr, PermConst, Sort, Var, sort_of, sorts_compatible

T = TypeVar("T", Expr, PointsTo, Block, PredApp, Assertion, PredClause)


class Substitution(Mapping[Var, Expr]):
    """
    Finite, simultaneous map from variables to terms of a matching sort.

    The domain never holds ``Mut``/``Imm``; applying is a single pass, so
    ranges never need to be re-substituted.
    """

    __slots__ = ("_items", "_map")

    def __init__(self, mapping: Mapping[Var, Expr] | Iterable[tuple[Var, Expr]] = ()) -> None:
        items = dict(mapping.items() if isinstance(mapping, Mapping) else mapping)
        for var, image in items.items():
            if not isinstance(var, Var):
                raise ValueError(f"Substitution domain must contain variables, got {var!r}")
            image_sort = sort_of(image)
            if not sorts_compatible(var.sort, image_sort):
                raise ValueError(
                    f"Sort mismatch in substitution: {var.name} has sort {var.sort.value}, "
                    f"image {image} has sort {image_sort.value}"
                )
            if isinstance(image, PermConst) and var.sort != Sort.PERM:
                raise ValueError(f"Permission {image} mapped to non-permission {var.name}")
        # identity bindings carry no information
        self._items = tuple(
            sorted(((k, v) for k, v in items.items() if k != v), key=lambda kv: kv[0].name)
        )
        self._map = dict(self._items)

    def __getitem__(self, key: Var) -> Expr:
        return self._map[key]

    def __iter__(self) -> Iterator[Var]:
        return (var for var, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return hash(self._items)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Substitution):
            return self._items == other._items
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{image}/{var.name}" for var, image in self._items)
        return f"[{body}]"

    def as_dict(self) -> dict[Var, Expr]:
        return dict(self._items)

    def extend(self, var: Var, image: Expr) -> Substitution:
        items = self.as_dict()
        items[var] = image
        return Substitution(items)

    def compose(self, first: Substitution) -> Substitution:
        """``self . first``: apply ``first`` and then ``self``."""
        items = {var: image.subst(self) for var, image in first.items()}
        for var, image in self.items():
            items.setdefault(var, image)
        return Substitution(items)

    def range_vars(self) -> frozenset[Var]:
        result: frozenset[Var] = frozenset()
        for _, image in self._items:
            result = result | image.free_vars()
        return result


IDENTITY = Substitution()


def apply_subst(sigma: Mapping[Var, Expr], term: T) -> T:
    """Simultaneous capture-free replacement (there are no binders in terms)."""
    if not sigma:
        return term
    return term.subst(sigma)  # type: ignore[return-value]


def free_vars(term: Expr | PointsTo | Block | PredApp | Assertion | PredClause) -> frozenset[Var]:
    """All variables of ``term``, borrow variables included."""
    return term.free_vars()
