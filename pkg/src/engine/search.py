"""
Depth-first backtracking proof search.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from ..core import Heaplet, Statement
from .goals import Goal
from .rules import Rule, RuleEnv, RuleResult, normalize

logger = logging.getLogger(__name__)


class Outcome(str, Enum):
    SYNTHESIZED = "Synthesized"
    TIMEOUT = "Timeout"
    NO_SOLUTION = "NoSolution"


@dataclass
class SearchStats:
    rules_fired: int = 0
    backtracks: int = 0
    wall_time_ms: float = 0.0
    ast_size: int | None = None
    outcome: Outcome = Outcome.NO_SOLUTION
    solver_queries: int = 0
    solver_time_ms: float = 0.0

    def as_dict(self) -> dict[str, object]:
        return {
            "rules_fired": self.rules_fired,
            "backtracks": self.backtracks,
            "wall_time_ms": round(self.wall_time_ms, 1),
            "ast_size": self.ast_size,
            "outcome": self.outcome.value,
            "solver_queries": self.solver_queries,
            "solver_time_ms": round(self.solver_time_ms, 1),
        }


@dataclass
class Derivation:
    """Solved node: the normalized goal, the rule closing it and its children."""

    goal: Goal
    rule: str
    description: str = ""
    normalization: tuple[str, ...] = ()
    children: list[Derivation] = field(default_factory=list)
    consumed: tuple[Heaplet, ...] = ()

    def depth(self) -> int:
        return 1 + max((child.depth() for child in self.children), default=0)

    def nodes(self) -> list[Derivation]:
        result = [self]
        for child in self.children:
            result += child.nodes()
        return result


class SearchTimeout(Exception):
    pass


@dataclass
class _Failure:
    # failures below the depth cut depend on the path, not the goal
    cut: bool = False


class ProofSearch:
    """
    One search run. Invertible rules go first and are committed to; the
    rest are tried in rule order, and the first alternative whose subgoals
    all succeed closes the goal. Failed goals are memoized by content unless
    the depth cut was involved.
    """

    def __init__(self, env: RuleEnv, rules: list[Rule]) -> None:
        self.env = env
        self.invertible = [rule for rule in rules if rule.invertible]
        self.rules = [rule for rule in rules if not rule.invertible]
        self.config = env.config
        self.stats = SearchStats()
        self._failed: set[tuple] = set()
        self._deadline = 0.0

    def run(self, goal: Goal) -> tuple[Statement, Derivation] | None:
        """Raises SearchTimeout once the configured budget is spent."""
        self._deadline = time.monotonic() + self.config.timeout_ms / 1000
        found = self._solve(goal, 0)
        if isinstance(found, _Failure):
            return None
        return found

    def _solve(self, goal: Goal, depth: int) -> tuple[Statement, Derivation] | _Failure:
        if time.monotonic() > self._deadline:
            raise SearchTimeout(f"timeout after {self.config.timeout_ms} ms")
        if depth > self.config.max_derivation_depth:
            return _Failure(cut=True)

        normal = normalize(goal, self.env)
        self.stats.rules_fired += len(normal.steps)
        current = normal.goal
        if normal.terminal is not None:
            leaf = Derivation(current, "Inconsistency", normalization=tuple(normal.steps))
            return normal.terminal, leaf
        if normal.pruned is not None:
            logger.debug("Pruned at depth %d: %s", depth, normal.pruned)
            return _Failure()

        key = current.key()
        if key in self._failed:
            return _Failure()

        cut = False
        for alternative in self._alternatives(current):
            self.stats.rules_fired += 1
            logger.debug("%d %s %s", depth, alternative.rule, alternative.description)
            programs: list[Statement] = []
            children: list[Derivation] = []
            failed = False
            for subgoal in alternative.subgoals:
                solved = self._solve(subgoal, depth + 1)
                if isinstance(solved, _Failure):
                    cut = cut or solved.cut
                    failed = True
                    break
                programs.append(solved[0])
                children.append(solved[1])
            if failed:
                self.stats.backtracks += 1
                continue
            node = Derivation(
                current,
                alternative.rule,
                alternative.description,
                tuple(normal.steps),
                children,
                alternative.consumed,
            )
            return alternative.producer(programs), node

        if not cut:
            self._failed.add(key)
        return _Failure(cut=cut)

    def _alternatives(self, goal: Goal) -> Iterator[RuleResult]:
        for rule in self.invertible:
            committed = next(iter(rule.apply(goal, self.env)), None)
            if committed is not None:
                yield committed
                return
        for rule in self.rules:
            yield from rule.apply(goal, self.env)
