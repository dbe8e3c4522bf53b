"""
Tests for heap matching, unification orders and the brute-force oracle.
"""
from __future__ import annotations

import random

import pytest

from src.core import MUT, IntConst, PointsTo, PredApp, Sort, Substitution, Var, borrow
from src.unifier import (
    UnifOrder,
    UnifTask,
    brute_force_unifiers,
    heaplet_size,
    is_read_only,
    is_sound,
    match_heaplet,
    match_term,
    perm_compatible,
    random_task,
    run_unifier_suite,
    unify,
)

pytestmark = pytest.mark.unit

x = Var("x", Sort.LOC)
y = Var("y", Sort.LOC)
z = Var("z", Sort.LOC)
v = Var("v")
p = Var("p", Sort.PERM)
a = borrow("a")
S1 = Var("S1", Sort.SET)
S2 = Var("S2", Sort.SET)


class TestMatching:
    def test_existential_perm_accepts_anything(self):
        assert perm_compatible(a, p, {p}) == Substitution({p: a})
        assert perm_compatible(MUT, p, {p}) == Substitution({p: MUT})

    def test_mut_never_accepts_a_borrow(self):
        assert perm_compatible(a, MUT, set()) is None
        assert perm_compatible(MUT, MUT, set()) == Substitution()

    def test_match_term_binds_existentials(self):
        assert match_term(v, IntConst(4), {v}, Substitution()) == Substitution({v: IntConst(4)})
        assert match_term(v, IntConst(4), set(), Substitution()) is None

    def test_loose_predicate_match(self):
        pattern = PredApp("ls", (x, S1), (MUT,))
        target = PredApp("ls", (x, S2), (MUT,))
        assert match_heaplet(pattern, target, set(), Substitution()) is None
        assert match_heaplet(pattern, target, set(), Substitution(), loose=True) == Substitution()

    def test_sizes(self):
        assert heaplet_size(PredApp("ls", (x, S1))) == 2
        assert is_read_only(PointsTo(x, 0, v, a))
        assert not is_read_only(PointsTo(x, 0, v))


class TestUnify:
    target = (PointsTo(x, 0, IntConst(1)), PointsTo(y, 0, IntConst(2), a))

    def test_mut_pattern_skips_borrowed_cells(self):
        task = UnifTask(self.target, (PointsTo(z, 0, v),), frozenset({z, v}))
        assert list(unify(task)) == [Substitution({z: x, v: IntConst(1)})]

    def test_read_only_first(self):
        task = UnifTask(self.target, (PointsTo(z, 0, v, p),), frozenset({z, v, p}))
        first = next(unify(task, UnifOrder.READ_ONLY_FIRST))
        assert first[z] == y
        assert set(unify(task)) == brute_force_unifiers(task)
        assert len(brute_force_unifiers(task)) == 2

    def test_every_order_yields_the_same_set(self):
        task = UnifTask(self.target, (PointsTo(z, 0, v, p),), frozenset({z, v, p}))
        expected = brute_force_unifiers(task)
        for strategy in UnifOrder:
            stream = list(unify(task, strategy))
            assert set(stream) == expected
            assert len(stream) == len(expected)

    def test_target_must_be_existential_free(self):
        with pytest.raises(ValueError, match="existentials"):
            UnifTask((PointsTo(x, 0, v),), (), frozenset({v}))

    def test_unknown_order(self):
        with pytest.raises(ValueError):
            UnifOrder.of(6)


class TestOracle:
    def test_random_tasks_are_sound(self):
        rng = random.Random(11)
        for _ in range(25):
            task = random_task(rng)
            for sigma in unify(task):
                assert is_sound(sigma, task)

    def test_suite(self):
        report = run_unifier_suite(samples=200, seed=3)
        assert report.total == 200
        assert report.passed, report.failures
