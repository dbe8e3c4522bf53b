"""
Tests for terms, assertions, substitutions and evaluation.
"""
from __future__ import annotations

import pytest

from src.core import (
    MUT,
    TRUE,
    Assertion,
    Block,
    BinOp,
    IntConst,
    Op,
    PointsTo,
    PredApp,
    SetLit,
    Sort,
    Substitution,
    Var,
    borrow,
    conj,
    conjuncts,
    eq,
    evaluate,
    fresh_name,
    holds,
    plus,
)

pytestmark = pytest.mark.unit

x = Var("x", Sort.LOC)
y = Var("y", Sort.LOC)
v = Var("v")
S = Var("S", Sort.SET)


class TestTerms:
    def test_var_identity_ignores_sort(self):
        assert Var("x", Sort.LOC) == Var("x", Sort.INT)

    def test_plus_zero_is_base(self):
        assert plus(x, 0) is x
        assert plus(x, 1) == BinOp(Op.PLUS, x, IntConst(1))

    def test_conjuncts_drop_true(self):
        formula = conj([TRUE, eq(v, IntConst(1)), TRUE])
        assert conjuncts(formula) == [eq(v, IntConst(1))]
        assert conj([]) == TRUE

    def test_format(self):
        assert str(BinOp(Op.UNION, SetLit((v,)), S)) == "{v} ++ S"
        assert str(eq(plus(x, 1), IntConst(0))) == "x + 1 == 0"


class TestAssertion:
    def test_spatial_is_canonical(self):
        cell = PointsTo(x, 0, v)
        block = Block(x, 2)
        assert Assertion(TRUE, (cell, block)) == Assertion(TRUE, (block, cell))

    def test_predicate_tag_is_not_compared(self):
        assert PredApp("ls", (x, S), (MUT,), tag=1) == PredApp("ls", (x, S), (MUT,), tag=0)

    def test_remove_and_free_vars(self):
        a = borrow("a")
        heap = Assertion(TRUE, (PointsTo(x, 0, v, a), PointsTo(y, 0, IntConst(3))))
        rest = heap.remove(PointsTo(x, 0, v, a))
        assert rest.spatial == (PointsTo(y, 0, IntConst(3)),)
        assert heap.free_vars() == {x, y, v, a}
        assert Assertion(TRUE).is_emp()

    def test_mut_is_not_printed(self):
        assert str(PointsTo(x, 1, v)) == "(x + 1) :-> v"
        assert str(PointsTo(x, 0, v, borrow("a"))) == "x :-> v<a>"


class TestSubstitution:
    def test_identity_bindings_are_dropped(self):
        assert len(Substitution({v: v})) == 0

    def test_sort_mismatch(self):
        with pytest.raises(ValueError, match="Sort mismatch"):
            Substitution({S: IntConst(1)})

    def test_perm_into_value_is_rejected(self):
        with pytest.raises(ValueError):
            Substitution({v: MUT})

    def test_application_is_simultaneous(self):
        sigma = Substitution({x: y, y: x})
        assert PointsTo(x, 0, y).subst(sigma) == PointsTo(y, 0, x)

    def test_compose(self):
        first = Substitution({v: Var("w")})
        second = Substitution({Var("w"): IntConst(2)})
        assert second.compose(first)[v] == IntConst(2)


class TestEvaluation:
    def test_sets_and_arithmetic(self):
        env = {"v": 3, "S": frozenset({1})}
        assert evaluate(BinOp(Op.UNION, SetLit((v,)), S), env) == frozenset({1, 3})
        assert evaluate(plus(v, 2), env) == 5
        assert holds(BinOp(Op.LE, v, IntConst(3)), env)

    def test_unbound_variable(self):
        with pytest.raises(KeyError):
            evaluate(v, {})


class TestFreshName:
    def test_free_base_is_kept(self):
        assert fresh_name("nxt", {"x"}) == "nxt"

    def test_smallest_free_suffix(self):
        assert fresh_name("x", {"x", "x1"}) == "x2"
        assert fresh_name("x1", {"x1"}) == "x2"
