"""
Tests for the spec-file front end and the program printer.
"""
from __future__ import annotations

import pytest

from src.bench import load_corpus, negative_specs
from src.core import (
    IntConst,
    Load,
    Procedure,
    Sort,
    Store,
    Var,
    WellFormednessError,
    eq,
    seq,
)
from src.core.program import Call, Free, If, Skip
from src.specparser import (
    SpecParseError,
    ast_size,
    load_spec,
    parse_program,
    parse_spec,
    print_program,
    print_spec,
)

x = Var("x", Sort.LOC)
nxt = Var("nxt", Sort.LOC)

PICK = """
void pick(loc x, loc y)
  {x :-> 239 ** y :-> 30<a>}
  {z <= 100 ; x :-> z ** y :-> z<a>}
"""


@pytest.mark.unit
class TestParse:
    def test_pick(self):
        spec = parse_spec(PICK)
        assert spec.goal_spec.name == "pick"
        assert [f.name for f in spec.goal_spec.formals] == ["x", "y"]
        assert {v.name for v in spec.goal_spec.existentials()} == {"z"}
        assert spec.library == ()

    def test_sorts_are_inferred(self):
        spec = parse_spec(PICK)
        sorts = {v.name: v.sort for v in spec.goal_spec.pre.free_vars()}
        assert sorts["a"] == Sort.PERM
        assert sorts["x"] == Sort.LOC

    def test_no_goal(self):
        with pytest.raises(SpecParseError, match="no goal"):
            parse_spec("# only a comment\n")

    def test_syntax_error_has_position(self):
        with pytest.raises(SpecParseError) as info:
            parse_spec("void f(loc x)\n  {x :-> }\n  {emp}")
        assert info.value.line == 2

    def test_imm_is_rejected(self):
        with pytest.raises(SpecParseError):
            parse_spec("void f(loc x) {x :-> 1<Imm>} {x :-> 1<Imm>}")

    def test_existential_borrow_is_rejected(self):
        with pytest.raises(WellFormednessError) as info:
            parse_spec("void f(loc x) {x :-> v} {x :-> v<b>}")
        assert [violation.variable for violation in info.value.violations] == ["b"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_spec(tmp_path / "missing.bossl")


@pytest.mark.unit
class TestDirectives:
    BODY = "void f(loc x) {x :-> 1} {x :-> 1}\n"

    def test_budgets_are_collected(self):
        text = "#! max_close_depth = 2\n#!max_unfold_depth=3\n" + self.BODY
        assert parse_spec(text).budgets == (("max_close_depth", 2), ("max_unfold_depth", 3))

    def test_no_directives(self):
        assert parse_spec(self.BODY).budgets == ()

    def test_printed_back(self):
        source = parse_spec("#! max_calls_per_path = 4\n" + self.BODY)
        text = print_spec(source)
        assert text.startswith("#! max_calls_per_path = 4")
        assert parse_spec(text) == source

    @pytest.mark.parametrize(
        "directive, message",
        [
            ("#! max_close_depth 2", "malformed directive"),
            ("#! timeout_ms = 10", "unknown directive 'timeout_ms'"),
            ("#! max_close_depth = 0", "must be positive"),
        ],
    )
    def test_bad_directive_names_its_line(self, directive, message):
        with pytest.raises(SpecParseError, match=message) as info:
            parse_spec("# header\n" + directive + "\n" + self.BODY)
        assert info.value.line == 2


@pytest.mark.unit
class TestCorpus:
    def test_every_benchmark_parses(self, corpus_dir):
        for bench in load_corpus(corpus_dir):
            spec = load_spec(bench.path)
            assert spec.goal_spec.name

    def test_round_trip(self, corpus_dir):
        for bench in load_corpus(corpus_dir):
            spec = load_spec(bench.path)
            assert parse_spec(print_spec(spec)) == spec, bench.path.name

    def test_negative_specs_are_rejected(self, corpus_dir):
        negatives = negative_specs(corpus_dir)
        assert len(negatives) == 3
        for path in negatives:
            with pytest.raises(ValueError):
                load_spec(path)

    def test_library_functions(self, spec):
        call_reset = spec("call_reset.bossl")
        assert [f.name for f in call_reset.library] == ["reset"]
        assert call_reset.goal_spec.name == "call_reset"
        assert set(call_reset.context().functions) == {"reset", "call_reset"}


@pytest.mark.unit
class TestPrinter:
    def test_store(self):
        proc = Procedure("pick", (x, Var("y", Sort.LOC)), Store(x, 0, IntConst(30)))
        assert print_program(proc) == "void pick(loc x, loc y) {\n  *x = 30;\n}"
        assert ast_size(proc) == 5

    def test_ast_size(self):
        body = If(
            eq(x, IntConst(0)),
            Skip(),
            seq(Load("nxt", x, 1), Free(x), Call("dispose", (nxt,))),
        )
        proc = Procedure("dispose", (x,), body)
        # if: 1 + cond 3; load: 2 + (x + 1) 3; free: 2; call: 2; formal: 1
        assert ast_size(proc) == 4 + 5 + 2 + 2 + 1

    def test_program_round_trip(self):
        body = If(
            eq(x, IntConst(0)),
            Skip(),
            seq(Load("nxt", x, 1), Store(x, 0, IntConst(0)), Call("reset", (nxt,))),
        )
        proc = Procedure("reset", (x,), body)
        assert parse_program(print_program(proc)) == [proc]
