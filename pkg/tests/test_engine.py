"""
Tests for proof search: rule orders, borrow handling and corpus synthesis.
"""
from __future__ import annotations

import pytest

from src.config import RULE_ORDERS
from src.core import (
    MUT,
    TRUE,
    Assertion,
    Context,
    PointsTo,
    Sort,
    Substitution,
    Var,
    borrow,
)
from src.engine import (
    ORDERS,
    Derivation,
    Goal,
    Outcome,
    check_trace,
    check_well_formed,
    describe_order,
    rule_order,
    synthesize,
    synthesize_all,
    to_mut_mode,
)
from src.engine import synthesis
from src.engine.rules import _bind_formals
from src.engine.synthesis import prepare
from src.interpreter import check_ro_preservation
from src.specparser import parse_spec, print_program

PICK_PROGRAM = "void pick(loc x, loc y) {\n  *x = 30;\n}"
MODES = ["imm", "mut"]
SWEPT = [
    "lcopy-len.bossl",
    "lcopy-val.bossl",
    "lcopy-all.bossl",
    "tcopy.bossl",
    "tcopy-ptr.bossl",
    "sorted-insert.bossl",
]


def run(spec, config, mode="imm", perturbation=0):
    search = config.search.with_mode(mode).with_perturbation(perturbation)
    return synthesize(spec, search, config.solver, use_smt=False)


def validate(spec, result, config, library=(), samples=20, mode="imm"):
    prepared = prepare(spec, config.search.with_mode(mode))
    procedures = {item.spec.name: item.procedure for item in library}
    procedures[result.procedure.name] = result.procedure
    return check_ro_preservation(
        procedures,
        prepared.goal_spec,
        prepared.predicates,
        config.interpreter,
        samples,
        config.validation.seed,
    )

@pytest.mark.unit
class TestOrders:
    def test_seven_orders(self):
        assert len(ORDERS) == RULE_ORDERS
        assert len(set(ORDERS)) == RULE_ORDERS

    def test_every_order_has_every_rule(self):
        for order in ORDERS:
            assert sorted(order) == sorted(ORDERS[0])

    def test_descriptions(self):
        assert describe_order(0) == "default"
        assert describe_order(1) == "write first, open/call high"

    def test_unknown_order(self):
        with pytest.raises(ValueError):
            rule_order(RULE_ORDERS)


@pytest.mark.unit
class TestModes:
    def test_mut_mode_rewrites_every_borrow(self, spec):
        mutable = to_mut_mode(spec("reset.bossl"))
        for function in mutable.functions:
            for assertion in (function.pre, function.post):
                assert not [v for v in assertion.free_vars() if v.sort == Sort.PERM]
        assert mutable.goal_spec.pre.spatial[0].perms == (MUT, MUT, MUT)

    def test_imm_mode_keeps_borrows(self, spec, config):
        prepared = prepare(spec("pick.bossl"), config.search.with_mode("imm"))
        assert prepared == spec("pick.bossl")

    def test_well_formed_corpus(self, spec):
        check_well_formed(spec("listcopy.bossl"))


@pytest.mark.integration
class TestPick:
    def test_imm_converges_without_backtracking(self, spec, config):
        result = run(spec("pick.bossl"), config, "imm")
        assert result.stats.outcome == Outcome.SYNTHESIZED
        assert print_program(result.procedure) == PICK_PROGRAM
        assert result.stats.backtracks == 0
        assert result.stats.ast_size == 5

    def test_mut_finds_the_same_program_after_backtracking(self, spec, config):
        imm = run(spec("pick.bossl"), config, "imm")
        mut = run(spec("pick.bossl"), config, "mut")
        assert print_program(mut.procedure) == PICK_PROGRAM
        assert mut.stats.backtracks > imm.stats.backtracks

    def test_derivation_respects_borrows(self, spec, config):
        result = run(spec("pick.bossl"), config)
        assert check_trace(result.derivation) == []

    def test_result_validates(self, spec, config):
        result = run(spec("pick.bossl"), config)
        report = validate(spec("pick.bossl"), result, config)
        assert report.passed, report.render()

    def test_repeated_runs_agree(self, spec, config):
        first = run(spec("pick.bossl"), config)
        second = run(spec("pick.bossl"), config)
        assert first.procedure == second.procedure
        assert first.stats.rules_fired == second.stats.rules_fired


@pytest.mark.integration
class TestBorrows:
    SPEC = "void bump(loc x)\n  {x :-> 1<a>}\n  {x :-> 2<a>}\n"

    def test_borrowed_cell_cannot_be_written(self, config):
        result = run(parse_spec(self.SPEC), config, "imm")
        assert result.stats.outcome == Outcome.NO_SOLUTION
        assert result.procedure is None
        assert result.stats.ast_size is None

    def test_mut_mode_writes_it(self, config):
        result = run(parse_spec(self.SPEC), config, "mut")
        assert print_program(result.procedure) == "void bump(loc x) {\n  *x = 2;\n}"

    def test_read_only_sum(self, spec, config):
        result = run(spec("readxy.bossl"), config)
        text = print_program(result.procedure)
        assert "*r = " in text
        assert "*x = " not in text and "*y = " not in text
        assert validate(spec("readxy.bossl"), result, config).passed


@pytest.mark.integration
class TestLists:
    def test_reset(self, spec, config):
        result = run(spec("reset.bossl"), config)
        text = print_program(result.procedure)
        assert result.stats.outcome == Outcome.SYNTHESIZED
        assert "*x = 0;" in text
        assert "reset(nxt" in text
        assert "*(x + 1) =" not in text
        assert check_trace(result.derivation) == []
        report = validate(spec("reset.bossl"), result, config)
        assert report.passed, report.render()

    def test_dispose(self, spec, config):
        result = run(spec("dispose.bossl"), config)
        text = print_program(result.procedure)
        assert "free(x);" in text
        assert "dispose(" in text
        assert validate(spec("dispose.bossl"), result, config).passed

    def test_call_reset_uses_the_library(self, spec, config):
        source = spec("call_reset.bossl")
        library, result = synthesize_all(source, config.search, config.solver, use_smt=False)
        assert [item.spec.name for item in library] == ["reset"]
        assert all(item.succeeded for item in library)
        assert "reset(" in print_program(result.procedure)
        report = validate(source, result, config, library)
        assert report.passed, report.render()

    def test_library_is_searched_once(self, spec, config, mocker):
        spy = mocker.spy(synthesis, "synthesize_function")
        library, _ = synthesize_all(
            spec("call_reset.bossl"), config.search, config.solver, use_smt=False
        )
        assert spy.call_count == len(library) + 1 == 2

    @pytest.mark.parametrize("mode", MODES)
    def test_listcopy(self, spec, config, mode):
        result = run(spec("listcopy.bossl"), config, mode)
        assert result.stats.outcome == Outcome.SYNTHESIZED
        text = print_program(result.procedure)
        assert "malloc(2)" in text
        assert "listcopy(r);" in text
        assert check_trace(result.derivation) == []
        report = validate(spec("listcopy.bossl"), result, config, mode=mode)
        assert report.passed, report.render()

    def test_listcopy_leaves_the_borrowed_list_alone(self, spec, config):
        text = print_program(run(spec("listcopy.bossl"), config, "imm").procedure)
        assert "*r = nxt;" in text
        assert "*x =" not in text
        assert "*(x + 1) =" not in text

    def test_shape_copy_returns_an_empty_list(self, spec, config):
        result = run(spec("lcopy.bossl"), config)
        text = print_program(result.procedure)
        assert result.stats.outcome == Outcome.SYNTHESIZED
        assert "*r = 0;" in text
        assert "malloc" not in text


@pytest.mark.integration
class TestSweptBenchmarks:
    @pytest.mark.slow
    @pytest.mark.parametrize("mode", MODES)
    @pytest.mark.parametrize("name", SWEPT)
    def test_synthesizes_and_validates(self, spec, config, name, mode):
        result = run(spec(name), config, mode)
        assert result.stats.outcome == Outcome.SYNTHESIZED
        assert check_trace(result.derivation) == []
        report = validate(spec(name), result, config, mode=mode)
        assert report.passed, report.render()

    def test_sorted_insert_recurses_under_a_comparison(self, spec, config):
        source = spec("sorted-insert.bossl")
        assert dict(source.budgets) == {"max_close_depth": 2}
        text = print_program(run(source, config).procedure)
        assert "sinsert(r, k);" in text
        assert text.count("if (") == 2
        assert "malloc(2)" in text


x = Var("x", Sort.LOC)
v = Var("v")
BORROWED = PointsTo(x, 0, v, borrow("a"))


def goal(*heaplets, post=()):
    return Goal(
        frozenset({x}),
        frozenset(),
        Assertion(TRUE, heaplets),
        Assertion(TRUE, post),
        Context(),
        "f",
    )


@pytest.mark.unit
class TestTraceViolations:
    def test_borrow_turned_mutable(self):
        child = Derivation(goal(PointsTo(x, 0, v, MUT)), "Emp")
        root = Derivation(goal(BORROWED), "Read", children=[child])
        (violation,) = check_trace(root)
        assert violation.kind == "strengthening"
        assert violation.location == "cell x 0"

    def test_borrow_kept_by_callee(self):
        child = Derivation(goal(), "Emp")
        root = Derivation(goal(BORROWED), "Call", "g(x)", children=[child], consumed=(BORROWED,))
        (violation,) = check_trace(root)
        assert violation.kind == "unreturned borrow"
        assert "not returned by g(x)" in violation.detail

    def test_borrow_returned_with_another_annotation(self):
        child = Derivation(goal(PointsTo(x, 0, v, borrow("b"))), "Emp")
        root = Derivation(goal(BORROWED), "Call", "g(x)", children=[child], consumed=(BORROWED,))
        (violation,) = check_trace(root)
        assert "returned with <b>" in str(violation)

    def test_mutable_cell_may_be_disposed(self):
        cell = PointsTo(x, 0, v, MUT)
        child = Derivation(goal(), "Emp")
        root = Derivation(goal(cell), "Call", "g(x)", children=[child], consumed=(cell,))
        assert check_trace(root) == []


@pytest.mark.unit
class TestGoals:
    def test_fresh_names_share_a_memo_key(self):
        w, v1, w1 = Var("w"), Var("v1"), Var("w1")
        first = goal(PointsTo(x, 0, v), post=(PointsTo(x, 0, w),))
        second = goal(PointsTo(x, 0, v1), post=(PointsTo(x, 0, w1),))
        assert first.key() == second.key()

    def test_existentials_change_the_key(self):
        open_value = goal(PointsTo(x, 0, v), post=(PointsTo(x, 0, Var("w")),))
        same_value = goal(PointsTo(x, 0, v), post=(PointsTo(x, 0, v),))
        assert open_value.key() != same_value.key()

    def test_predicates_mark_the_unfolding_phase(self, spec):
        function = spec("listcopy.bossl").goal_spec
        sigma = spec("listcopy.bossl").context()
        assert Goal.of(function, sigma).has_predicates()
        assert not goal(BORROWED).has_predicates()

    def test_goal_of_spec_splits_variables(self, spec):
        function = spec("listcopy.bossl").goal_spec
        start = Goal.of(function, spec("listcopy.bossl").context())
        assert start.gamma == frozenset(function.formals)
        assert {var.name for var in start.ghosts} == {"x", "S", "a", "b", "c"}
        assert {var.name for var in start.existentials()} == {"y"}


@pytest.mark.unit
class TestCallFormals:
    r = Var("r", Sort.LOC)
    k = Var("k")
    j = Var("j")

    def test_unbound_formals_take_program_variables(self):
        r1, k1 = Var("r1", Sort.LOC), Var("k1")
        gamma = frozenset({self.r, self.k, self.j})
        bindings = list(_bind_formals(Substitution({r1: self.r}), (r1, k1), gamma))
        assert [binding[k1] for binding in bindings] == [self.j, self.k]
        assert all(binding[r1] == self.r for binding in bindings)

    def test_formal_bound_to_a_ghost_is_rejected(self):
        r1 = Var("r1", Sort.LOC)
        sigma = Substitution({r1: Var("ghost", Sort.LOC)})
        assert list(_bind_formals(sigma, (r1,), frozenset({self.r}))) == []
