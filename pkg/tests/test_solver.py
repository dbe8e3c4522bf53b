"""
Tests for the pure solver, its normal forms and the SMT-LIB escape hatch.
"""
from __future__ import annotations

import subprocess

import pytest

from src.core import FALSE, IMM, MUT, TRUE, BinOp, IntConst, Neg, Op, Sort, Var, conj, eq
from src.solver import (
    EntailmentQuery,
    PureSolver,
    SmtAnswer,
    SmtBackend,
    SmtConfig,
    Verdict,
    extract_equalities,
    load_smt_config,
    make_solver,
    nnf,
    run_oracle_suite,
    simplify,
    to_smtlib,
)

v = Var("v")
w = Var("w")
a = Var("a", Sort.PERM)


def le(lhs, rhs):
    return BinOp(Op.LE, lhs, rhs)


def lt(lhs, rhs):
    return BinOp(Op.LT, lhs, rhs)


@pytest.fixture
def solver(config) -> PureSolver:
    return make_solver(config.solver, use_smt=False)


@pytest.mark.unit
class TestNormalForms:
    def test_simplify_folds_ground_terms(self):
        assert simplify(le(IntConst(1), IntConst(2))) == TRUE
        assert simplify(conj([eq(v, w), Neg(eq(v, w))])) == FALSE
        assert simplify(lt(v, v)) == FALSE

    def test_nnf_flips_orderings(self):
        assert nnf(Neg(le(v, w))) == lt(w, v)

    def test_extract_equalities(self):
        formula = conj([eq(v, IntConst(3)), le(w, v)])
        assert extract_equalities(formula) == [(v, IntConst(3))]


@pytest.mark.unit
class TestPureSolver:
    def test_valid_entailment(self, solver):
        assert solver.entails(eq(v, IntConst(1)), le(v, IntConst(1)))

    def test_transitivity(self, solver):
        assert solver.entails(conj([le(v, w), lt(w, IntConst(3))]), lt(v, IntConst(3)))

    def test_invalid_has_certified_countermodel(self, solver):
        result = solver.check_validity(EntailmentQuery(TRUE, le(v, IntConst(1))))
        assert result.verdict == Verdict.INVALID
        assert result.countermodel is not None
        assert result.countermodel["v"] > 1

    def test_unsat(self, solver):
        assert solver.is_unsat(conj([lt(v, w), lt(w, v)]))
        assert not solver.is_unsat(lt(v, w))

    def test_permissions_are_two_valued(self, solver):
        assert solver.entails(Neg(eq(a, MUT)), eq(a, IMM))

    def test_stats_and_cache(self, solver):
        query = EntailmentQuery(eq(v, IntConst(1)), le(v, IntConst(2)))
        solver.valid(query)
        solver.valid(query)
        assert solver.stats.queries == 1
        assert solver.stats.cache_hits == 1

    def test_non_formula_sides_are_rejected(self):
        with pytest.raises(ValueError):
            EntailmentQuery(v, TRUE)


@pytest.mark.unit
def test_oracle_suite(config):
    report = run_oracle_suite(config.solver, samples=150, seed=7)
    assert report.total == 150
    assert report.passed, report.disagreements


@pytest.mark.unit
class TestSmtBackend:
    def test_script(self):
        script = to_smtlib(conj([le(v, w), eq(a, MUT)]))
        assert "(declare-fun v_v () Int)" in script
        assert "(assert (or (= v_a 0) (= v_a 1)))" in script
        assert script.rstrip().endswith("(exit)")

    def test_answer_is_read_from_stdout(self, mocker):
        run = mocker.patch(
            "src.solver.smtlib.subprocess.run",
            return_value=subprocess.CompletedProcess(["z3"], 0, stdout="unsat\n", stderr=""),
        )
        backend = SmtBackend(SmtConfig("z3", ("-in",), 1.0))
        assert backend.check_sat(lt(v, v)) == SmtAnswer.UNSAT
        assert run.call_args.args[0] == ["z3", "-in"]
        assert "(check-sat)" in run.call_args.kwargs["input"]

    def test_timeout_is_unknown(self, mocker):
        mocker.patch(
            "src.solver.smtlib.subprocess.run",
            side_effect=subprocess.TimeoutExpired(["z3"], 1.0),
        )
        backend = SmtBackend(SmtConfig("z3", (), 1.0))
        assert backend.check_sat(lt(v, w)) == SmtAnswer.UNKNOWN

    def test_missing_binary_is_unknown(self, mocker):
        mocker.patch("src.solver.smtlib.subprocess.run", side_effect=FileNotFoundError("z3"))
        backend = SmtBackend(SmtConfig("z3", (), 1.0))
        assert backend.check_sat(lt(v, w)) == SmtAnswer.UNKNOWN

    def test_unset_env_disables_prover(self, monkeypatch):
        monkeypatch.delenv("BOSSL_SMT", raising=False)
        assert load_smt_config(5.0) is None

    def test_missing_solver_binary(self, monkeypatch, tmp_path):
        monkeypatch.setenv("BOSSL_SMT", str(tmp_path / "no-such-solver"))
        with pytest.raises(ValueError, match="BOSSL_SMT"):
            load_smt_config(5.0)

    def test_solver_without_env_has_no_backend(self, config, monkeypatch):
        monkeypatch.delenv("BOSSL_SMT", raising=False)
        assert make_solver(config.solver).smt is None
