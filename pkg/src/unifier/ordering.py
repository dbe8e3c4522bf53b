"""
Orders in which candidate (target, pattern) heaplet pairings are tried.
"""
from __future__ import annotations

from enum import IntEnum
from typing import Callable, Sequence

from ..core import MUT, Block, Heaplet, PointsTo, PredApp, heaplet_key, kind_rank
from ..core.heap import heaplet_perm

Pair = tuple[Heaplet, Heaplet]


class UnifOrder(IntEnum):
    READ_ONLY_FIRST = 0
    KIND_COST = 1
    SMALLEST_FIRST = 2
    LARGEST_FIRST = 3
    NAME_ASCENDING = 4
    NAME_DESCENDING = 5

    @classmethod
    def of(cls, strategy: int) -> UnifOrder:
        try:
            return cls(strategy)
        except ValueError:
            raise ValueError(
                f"Unknown unification order {strategy}; expected 0..{len(cls) - 1}"
            ) from None


def heaplet_size(heaplet: Heaplet) -> int:
    """Cells covered: one per points-to, the block size, the predicate arity."""
    if isinstance(heaplet, PointsTo):
        return 1
    if isinstance(heaplet, Block):
        return heaplet.size
    return len(heaplet.args)


def is_read_only(heaplet: Heaplet) -> bool:
    return any(perm != MUT for perm in heaplet_perm(heaplet))


def _name(heaplet: Heaplet) -> str:
    return heaplet.name if isinstance(heaplet, PredApp) else str(heaplet)


_KEYS: dict[UnifOrder, Callable[[Heaplet], tuple]] = {
    UnifOrder.READ_ONLY_FIRST: lambda h: (not is_read_only(h), kind_rank(h)),
    UnifOrder.KIND_COST: lambda h: (kind_rank(h),),
    UnifOrder.SMALLEST_FIRST: lambda h: (heaplet_size(h),),
    UnifOrder.LARGEST_FIRST: lambda h: (-heaplet_size(h),),
    UnifOrder.NAME_ASCENDING: lambda h: (_name(h),),
}


def rank_candidates(pairs: Sequence[Pair], strategy: int) -> list[Pair]:
    """
    Total order over candidate pairings, ranked by their target heaplet.

    Ties fall back to the canonical heaplet order, so the result depends on
    nothing but ``pairs`` and ``strategy``.
    """
    order = UnifOrder.of(strategy)

    def tiebreak(pair: Pair) -> tuple:
        return (heaplet_key(pair[0]), heaplet_key(pair[1]))

    if order == UnifOrder.NAME_DESCENDING:
        by_tiebreak = sorted(pairs, key=tiebreak)
        return sorted(by_tiebreak, key=lambda pair: _name(pair[0]), reverse=True)
    key = _KEYS[order]
    return sorted(pairs, key=lambda pair: (key(pair[0]), tiebreak(pair)))
