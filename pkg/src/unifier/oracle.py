"""
Brute-force oracle for heap unification on small instances.

``brute_force_unifiers`` does not match at all: it tries every assignment
of target subterms to the pattern's existentials and keeps the ones under
which some injective pairing makes pattern and target heaplets equal.
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field

from ..core import (
    MUT,
    BinOp,
    Block,
    Expr,
    Heaplet,
    IntConst,
    PointsTo,
    PredApp,
    SetLit,
    Sort,
    Substitution,
    Var,
    apply_subst,
    borrow,
)
from ..core.heap import heaplet_perm
from .unify import UnifTask, unify

logger = logging.getLogger(__name__)

# enumeration is exponential in the number of existentials
MAX_ASSIGNMENTS = 50000


def _subterms(term: Expr) -> list[Expr]:
    result = [term]
    if isinstance(term, SetLit):
        for elem in term.elems:
            result += _subterms(elem)
    if isinstance(term, BinOp):
        result += _subterms(term.lhs) + _subterms(term.rhs)
    return result


def _heaplet_terms(heaplet: Heaplet) -> list[Expr]:
    if isinstance(heaplet, PointsTo):
        terms = [heaplet.base, heaplet.value]
    elif isinstance(heaplet, Block):
        terms = [heaplet.base]
    else:
        terms = list(heaplet.args)
    return terms + list(heaplet_perm(heaplet))


def _candidates(task: UnifTask) -> list[Expr]:
    seen: list[Expr] = []
    for heaplet in task.target:
        for term in _heaplet_terms(heaplet):
            for sub in _subterms(term):
                if sub not in seen:
                    seen.append(sub)
    return seen


def _contained(instances: list[Heaplet], target: tuple[Heaplet, ...]) -> bool:
    """Multiset inclusion."""
    remaining = list(target)
    for heaplet in instances:
        if heaplet not in remaining:
            return False
        remaining.remove(heaplet)
    return True


def _pattern_existentials(task: UnifTask) -> list[Var]:
    pattern_vars: set[Var] = set()
    for heaplet in task.pattern:
        pattern_vars |= heaplet.free_vars()
    return sorted(pattern_vars & task.existentials, key=lambda v: v.name)


def assignment_count(task: UnifTask) -> int:
    return len(_candidates(task)) ** len(_pattern_existentials(task))


def brute_force_unifiers(task: UnifTask) -> set[Substitution]:
    variables = _pattern_existentials(task)
    candidates = _candidates(task)
    if len(candidates) ** len(variables) > MAX_ASSIGNMENTS:
        raise ValueError(f"Unification task too large for brute force: {len(variables)} variables")
    found: set[Substitution] = set()
    for images in itertools.product(candidates, repeat=len(variables)):
        try:
            sigma = Substitution(dict(zip(variables, images)))
        except ValueError:
            continue
        instances = [apply_subst(sigma, h) for h in task.pattern]
        if _contained(instances, task.target):
            found.add(sigma)
    return found


def is_sound(sigma: Substitution, task: UnifTask) -> bool:
    if any(var not in task.existentials for var in sigma):
        return False
    return _contained([apply_subst(sigma, h) for h in task.pattern], task.target)


# --- random tasks -------------------------------------------------------------

_BASES = [Var("x", Sort.LOC), Var("y", Sort.LOC)]
_VALUES = [Var("v"), IntConst(0), IntConst(1)]
_TARGET_PERMS = [MUT, MUT, borrow("c")]


def _target_heaplet(rng: random.Random) -> Heaplet:
    kind = rng.randrange(3)
    perm = rng.choice(_TARGET_PERMS)
    base = rng.choice(_BASES)
    if kind == 0:
        return PointsTo(base, rng.randrange(2), rng.choice(_VALUES), perm)
    if kind == 1:
        return Block(base, rng.choice((1, 2)), perm)
    return PredApp("ls", (base, Var("B", Sort.SET)), (perm, rng.choice(_TARGET_PERMS)))


def _generalize(heaplet: Heaplet, rng: random.Random, names: dict[object, Var]) -> Heaplet:
    """Replace some terms of a target heaplet by existentials."""

    def abstract(term: Expr, sort: Sort) -> Expr:
        if rng.random() < 0.5:
            return term
        return names.setdefault(term, Var(f"e{len(names)}", sort))

    def abstract_perm(perm: Expr) -> Expr:
        roll = rng.random()
        if roll < 0.4:
            return names.setdefault(("perm", perm), borrow(f"p{len(names)}"))
        if roll < 0.5:
            return MUT
        return perm

    if isinstance(heaplet, PointsTo):
        return PointsTo(
            abstract(heaplet.base, Sort.LOC),
            heaplet.offset,
            abstract(heaplet.value, Sort.INT),
            abstract_perm(heaplet.perm),
        )
    if isinstance(heaplet, Block):
        return Block(abstract(heaplet.base, Sort.LOC), heaplet.size, abstract_perm(heaplet.perm))
    return PredApp(
        heaplet.name,
        (abstract(heaplet.args[0], Sort.LOC), abstract(heaplet.args[1], Sort.SET)),
        tuple(abstract_perm(p) for p in heaplet.perms),
    )


def random_task(rng: random.Random) -> UnifTask:
    """Target of up to three heaplets; pattern generalizes some of them."""
    while True:
        target = tuple(_target_heaplet(rng) for _ in range(rng.randint(1, 3)))
        names: dict[object, Var] = {}
        chosen = rng.sample(list(target), rng.randint(1, len(target)))
        pattern = tuple(_generalize(h, rng, names) for h in chosen)
        task = UnifTask(target, pattern, frozenset(names.values()))
        if assignment_count(task) <= MAX_ASSIGNMENTS:
            return task


@dataclass
class UnifierReport:
    total: int = 0
    unifiers: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        return f"{self.total} tasks, {self.unifiers} unifiers, {len(self.failures)} failures"


def check_task(task: UnifTask, report: UnifierReport, strategy: int = 0) -> None:
    report.total += 1
    stream = list(unify(task, strategy))
    report.unifiers += len(stream)
    if len(stream) != len(set(stream)):
        report.failures.append(f"duplicate unifiers for {task}")
    for sigma in stream:
        if not is_sound(sigma, task):
            report.failures.append(f"unsound unifier {sigma} for {task}")
    expected = brute_force_unifiers(task)
    if set(stream) != expected:
        report.failures.append(
            f"stream {sorted(map(repr, stream))} != oracle {sorted(map(repr, expected))} for {task}"
        )


def run_unifier_suite(samples: int, seed: int) -> UnifierReport:
    rng = random.Random(seed)
    report = UnifierReport()
    for index in range(samples):
        check_task(random_task(rng), report, strategy=index % 6)
    for line in report.failures:
        logger.warning("Unifier oracle failure: %s", line)
    logger.info("Unifier oracle: %s", report.summary())
    return report
