"""
Tests for the heap machine, assertion satisfaction, model sampling and validation.
"""
from __future__ import annotations

import random

import pytest

from src.core import IMM, MUT, TRUE, Assertion, PointsTo, PredApp, Sort, Var, borrow
from src.interpreter import (
    Fault,
    Machine,
    Satisfaction,
    Validator,
    check_ro_preservation,
    format_model,
    meta,
    random_model,
    run,
    satisfies,
)
from src.specparser import parse_program

x = Var("x", Sort.LOC)
v = Var("v")
S = Var("S", Sort.SET)


def procedures(text: str) -> dict:
    return {p.name: p for p in parse_program(text)}


@pytest.mark.unit
class TestMachine:
    def test_malloc_and_free_balance(self):
        program = procedures("void f(loc x) { let y = malloc(2); *(y + 1) = 5; free(y); }")
        execution = run(program, "f", [0], {})
        assert execution.state.heap == {}
        assert execution.state.blocks == set()
        assert execution.trace == ["let y = malloc(2);", "*(y + 1) = 5;", "free(y);"]

    def test_allocation_layout(self):
        program = procedures("void f(loc x) { let y = malloc(2); }")
        machine = Machine(program, fuel=10)
        state = machine.initial_state("f", [0], {4: 1})
        address = state.allocate(2)
        assert state.heap[meta(address)] == 2
        assert address > 4
        assert state.heap[address] == state.heap[address + 1] == 0

    def test_read_of_unallocated_cell(self):
        program = procedures("void f(loc x) { let v = *x; }")
        with pytest.raises(Fault, match="read from unallocated address 7"):
            run(program, "f", [7], {})

    def test_free_of_non_block(self):
        program = procedures("void f(loc x) { free(x); }")
        with pytest.raises(Fault, match="non-block"):
            run(program, "f", [1], {1: 0})

    def test_error_statement(self):
        program = procedures("void f(loc x) { if (x == 0) { error; } else { } }")
        with pytest.raises(Fault) as info:
            run(program, "f", [0], {})
        assert info.value.trace == ["if (x == 0) -> then", "error;"]

    def test_out_of_fuel(self):
        program = procedures("void loop(loc x) { loop(x); }")
        with pytest.raises(Fault, match="out of fuel"):
            run(program, "loop", [0], {}, fuel=50)

    def test_unknown_callee(self):
        program = procedures("void f(loc x) { g(x); }")
        with pytest.raises(Fault, match="unknown procedure 'g'"):
            run(program, "f", [0], {})

    def test_read_only_writes_are_recorded(self):
        program = procedures("void f(loc x) { *x = 6; }")
        execution = run(program, "f", [1], {1: 5}, ro=frozenset({1}))
        assert execution.state.ro_writes == [1]
        assert execution.state.heap == {1: 6}

    def test_read_only_must_lie_in_the_heap(self):
        program = procedures("void f(loc x) { }")
        with pytest.raises(ValueError, match="outside the heap"):
            run(program, "f", [1], {1: 5}, ro=frozenset({2}))


def _list_heap() -> dict[int, int]:
    # one node at 2: meta 1, payload 7, next 0
    return {1: 2, 2: 7, 3: 0}


@pytest.mark.unit
class TestSatisfaction:
    def test_points_to_binds_value(self):
        checker = Satisfaction({}, frozenset(), depth=2)
        models = list(checker.models(Assertion(TRUE, (PointsTo(x, 0, v),)), {1: 5}, {"x": 1}))
        assert models == [{"x": 1, "v": 5}]

    def test_heap_must_be_consumed_exactly(self):
        checker = Satisfaction({}, frozenset(), depth=2)
        assert not checker.holds(Assertion(TRUE, (PointsTo(x, 0, v),)), {1: 5, 2: 0}, {"x": 1})

    def test_read_only_membership_must_match(self):
        cell = Assertion(TRUE, (PointsTo(x, 0, v, borrow("a")),))
        ro = frozenset({1})
        checker = Satisfaction({}, ro, depth=2)
        assert checker.holds(cell, {1: 5}, {"x": 1, "a": IMM.kind})
        assert not checker.holds(cell, {1: 5}, {"x": 1, "a": MUT.kind})

    def test_list_predicate(self, spec):
        definitions = {p.name: p for p in spec("reset.bossl").predicates}
        app = PredApp("ls", (x, S), (MUT, MUT, MUT))
        checker = Satisfaction(definitions, frozenset(), depth=6)
        models = list(checker.models(Assertion(TRUE, (app,)), _list_heap(), {"x": 2}))
        assert [m["S"] for m in models] == [frozenset({7})]

    def test_zeroed_list(self, spec):
        definitions = spec("reset.bossl").predicates
        app = PredApp("zls", (x,), (MUT, MUT, MUT))
        assertion = Assertion(TRUE, (app,))
        assert not satisfies(_list_heap(), {"x": 2}, frozenset(), assertion, definitions, 6)
        zeroed = {1: 2, 2: 0, 3: 0}
        assert satisfies(zeroed, {"x": 2}, frozenset(), assertion, definitions, 6)


@pytest.mark.unit
class TestModels:
    def test_pick_model(self, spec, config):
        pick = spec("pick.bossl")
        function = pick.goal_spec
        rng = random.Random(1)
        model = random_model(function.pre, {}, config.interpreter, rng, function.formals)
        assert model is not None
        x_addr, y_addr = model.args(function.formals)
        assert model.heap == {x_addr: 239, y_addr: 30}
        assert (y_addr in model.ro) == (model.env["a"] == IMM.kind)
        assert x_addr not in model.ro

    def test_list_models_satisfy_the_precondition(self, spec, config):
        source = spec("reset.bossl")
        table = {p.name: p for p in source.predicates}
        pre = source.goal_spec.pre
        rng = random.Random(5)
        for _ in range(10):
            model = random_model(pre, table, config.interpreter, rng, source.goal_spec.formals)
            assert model is not None
            checker = Satisfaction(table, model.ro, config.interpreter.unfold_depth)
            assert checker.holds(pre, model.heap, model.env)

    def test_format_model(self):
        assert format_model({2: 7, 1: 2}, {2}) == "1: 2\n2: 7\nRO: {2}"


RESET = """
void reset(loc x) {
  if (x == 0) {
  } else {
    let nxt = *(x + 1);
    *x = 0;
    reset(nxt);
  }
}
"""

WRONG_PAYLOAD = RESET.replace("*x = 0;", "*x = 1;")
CUT_TAIL = RESET.replace("reset(nxt);", "*(x + 1) = 0;")


@pytest.mark.integration
class TestValidator:
    def _validator(self, spec, config, text):
        source = spec("reset.bossl")
        return Validator(
            procedures(text),
            source.goal_spec,
            {p.name: p for p in source.predicates},
            config.interpreter,
        )

    def test_correct_reset_passes(self, spec, config):
        report = self._validator(spec, config, RESET).check(30, seed=1)
        assert report.passed, report.render()
        assert report.skipped == 0

    def test_wrong_payload_fails(self, spec, config):
        report = self._validator(spec, config, WRONG_PAYLOAD).check(30, seed=1)
        assert not report.passed
        assert "postcondition" in report.failures[0].reason

    def test_cut_tail_fails(self, spec, config):
        report = self._validator(spec, config, CUT_TAIL).check(30, seed=1)
        assert not report.passed
        assert "sample" in report.render()

    def test_samples_are_reproducible(self, spec, config):
        validator = self._validator(spec, config, RESET)
        first = validator.sample(3, seed=9)
        second = validator.sample(3, seed=9)
        assert first.model == second.model

    def test_threaded_check_matches_sequential(self, spec, config):
        validator = self._validator(spec, config, RESET)
        sequential = validator.check(12, seed=2)
        threaded = validator.check(12, seed=2, workers=3)
        assert [s.passed for s in sequential.samples] == [s.passed for s in threaded.samples]

    def test_missing_procedure(self, spec, config):
        with pytest.raises(ValueError, match="No procedure named reset"):
            self._validator(spec, config, "void other(loc x) { }")


LISTCOPY = """
void listcopy(loc r) {
  let x = *r;
  if (x == 0) {
    *r = 0;
  } else {
    let v = *x;
    let nxt = *(x + 1);
    *r = nxt;
    listcopy(r);
    let y1 = *r;
    let y = malloc(2);
    *y = v;
    *(y + 1) = y1;
    *r = y;
  }
}
"""

TAIL_SWAP = LISTCOPY.replace("*(y + 1) = y1;", "*(x + 1) = y1;")


@pytest.mark.integration
class TestReadOnlyPreservation:
    def _check(self, spec, config, text, samples=60):
        source = spec("listcopy.bossl")
        return check_ro_preservation(
            procedures(text),
            source.goal_spec,
            source.predicates,
            config.interpreter,
            samples,
            config.validation.seed,
        )

    def test_copy_passes(self, spec, config):
        report = self._check(spec, config, LISTCOPY)
        assert report.passed, report.render()

    def test_tail_swap_writes_a_borrowed_cell(self, spec, config):
        report = self._check(spec, config, TAIL_SWAP, samples=120)
        assert not report.passed
        immutable = [
            s
            for s in report.samples
            if s.model is not None
            and s.model.env["x"] != 0
            and all(s.model.env[name] == IMM.kind for name in ("a", "b", "c"))
        ]
        assert immutable
        for sample in immutable:
            assert sample.reason.startswith("write to read-only location"), sample.reason
