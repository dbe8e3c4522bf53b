"""
Heap unification: lazily enumerate substitutions over the existentials that
turn a pattern heap into a sub-multiset of a target heap.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator

from ..core import MUT, Heaplet, PointsTo, Substitution, Var, apply_subst, heaplet_key
from .matching import match_heaplet, same_shape
from .ordering import UnifOrder, rank_candidates

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnifTask:
    target: tuple[Heaplet, ...]
    pattern: tuple[Heaplet, ...]
    existentials: frozenset[Var]

    def __post_init__(self) -> None:
        for heaplet in self.target:
            clash = heaplet.free_vars() & self.existentials
            if clash:
                names = ", ".join(sorted(v.name for v in clash))
                raise ValueError(f"Target heaplet {heaplet} mentions existentials: {names}")


@dataclass(frozen=True)
class Matching:
    """
    A unifier plus the target heaplet each pattern heaplet was paired with.

    ``stores`` lists target cells whose value the pattern does not match; the
    instantiated pattern value has to be written there first.
    """

    sigma: Substitution
    pairs: tuple[tuple[Heaplet, Heaplet], ...]
    stores: tuple[tuple[PointsTo, PointsTo], ...] = ()

    def matched_targets(self) -> list[Heaplet]:
        return [target for target, _ in self.pairs]


def unify_pairings(
    task: UnifTask,
    strategy: int = UnifOrder.READ_ONLY_FIRST,
    *,
    abduce: bool = False,
) -> Iterator[Matching]:
    """
    Pairings in the order ``strategy`` ranks them.

    With ``abduce``, a points-to may also be paired with a ``Mut`` target
    cell regardless of its value; the pair is reported in ``Matching.stores``.
    Stores that turn out to be no-ops are the caller's to discard.
    """
    pattern = sorted(task.pattern, key=heaplet_key)
    yield from _pair(task, pattern, list(task.target), Substitution(), (), (), strategy, abduce)


def _pair(
    task: UnifTask,
    pending: list[Heaplet],
    available: list[Heaplet],
    sigma: Substitution,
    pairs: tuple[tuple[Heaplet, Heaplet], ...],
    stores: tuple[tuple[PointsTo, PointsTo], ...],
    strategy: int,
    abduce: bool,
) -> Iterator[Matching]:
    if not pending:
        yield Matching(sigma, pairs, stores)
        return
    current, rest = pending[0], pending[1:]
    candidates = [
        (target, current) for target in _distinct(available) if same_shape(current, target)
    ]
    for target, _ in rank_candidates(candidates, strategy):
        remaining = list(available)
        remaining.remove(target)
        step = match_heaplet(current, target, task.existentials, sigma)
        if step is not None:
            yield from _pair(
                task, rest, remaining, step, pairs + ((target, current),), stores, strategy, abduce
            )
        # a matching value may still be bound differently by later heaplets
        if abduce and isinstance(target, PointsTo) and target.perm == MUT:
            assert isinstance(current, PointsTo)
            step = match_heaplet(current, target, task.existentials, sigma, skip_value=True)
            if step is not None:
                yield from _pair(
                    task,
                    rest,
                    remaining,
                    step,
                    pairs + ((target, current),),
                    stores + ((target, current),),
                    strategy,
                    abduce,
                )


def _distinct(heaplets: list[Heaplet]) -> list[Heaplet]:
    """Identical target heaplets yield identical unifiers; try each once."""
    seen: list[Heaplet] = []
    for heaplet in heaplets:
        if heaplet not in seen:
            seen.append(heaplet)
    return seen


def unify(task: UnifTask, strategy: int = UnifOrder.READ_ONLY_FIRST) -> Iterator[Substitution]:
    """Duplicate-free stream of unifiers, deterministic for a fixed strategy."""
    emitted: set[Substitution] = set()
    for matching in unify_pairings(task, strategy):
        if matching.sigma not in emitted:
            emitted.add(matching.sigma)
            yield matching.sigma


def instantiate_pattern(sigma: Substitution, task: UnifTask) -> list[Heaplet]:
    return [apply_subst(sigma, heaplet) for heaplet in task.pattern]
