from __future__ import annotations

from .matching import match_heaplet, match_term, perm_compatible, same_shape
from .oracle import (
    UnifierReport,
    brute_force_unifiers,
    is_sound,
    random_task,
    run_unifier_suite,
)
from .ordering import UnifOrder, heaplet_size, is_read_only, rank_candidates
from .unify import Matching, UnifTask, instantiate_pattern, unify, unify_pairings

__all__ = [
    # matching
    "perm_compatible",
    "match_term",
    "match_heaplet",
    "same_shape",
    # ordering
    "UnifOrder",
    "rank_candidates",
    "heaplet_size",
    "is_read_only",
    # unification
    "UnifTask",
    "Matching",
    "unify",
    "unify_pairings",
    "instantiate_pattern",
    # oracle
    "UnifierReport",
    "brute_force_unifiers",
    "is_sound",
    "random_task",
    "run_unifier_suite",
]
