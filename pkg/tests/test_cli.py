"""
Tests for the bossl command line.
"""
from __future__ import annotations

import pytest

from src.bench import read_csv
from src.main import main, parse_modes, parse_perturbations

from .conftest import CORPUS, ROOT

CONFIG = str(ROOT / "config.yml")
PICK = str(CORPUS / "pick.bossl")


@pytest.fixture(autouse=True)
def no_external_prover(monkeypatch):
    monkeypatch.delenv("BOSSL_SMT", raising=False)


@pytest.mark.unit
class TestArguments:
    def test_perturbation_lists(self):
        assert parse_perturbations("0,3-5") == [0, 3, 4, 5]
        assert parse_perturbations("0-41") == list(range(42))

    @pytest.mark.parametrize("text", ["42", "5-3", "a", ""])
    def test_bad_perturbation_lists(self, text):
        with pytest.raises(ValueError):
            parse_perturbations(text)

    def test_modes(self):
        assert parse_modes("mut") == ["mut"]
        with pytest.raises(ValueError):
            parse_modes("imm,ro")

    def test_no_command(self, capsys):
        assert main([]) == 1

    def test_missing_config(self, tmp_path, capsys):
        assert main(["--config", str(tmp_path / "none.yml"), "oracle"]) == 1
        assert "Configuration error" in capsys.readouterr().out


@pytest.mark.integration
class TestSynth:
    def test_pick(self, capsys):
        assert main(["--config", CONFIG, "synth", PICK, "--mode", "imm"]) == 0
        out = capsys.readouterr().out
        assert "*x = 30;" in out
        assert "Synthesized" in out
        assert "Goal: pick" in out

    def test_missing_file(self, tmp_path, capsys):
        assert main(["--config", CONFIG, "synth", str(tmp_path / "missing.bossl")]) == 1
        assert "no goal" in capsys.readouterr().out

    def test_parse_error(self, tmp_path, capsys):
        broken = tmp_path / "broken.bossl"
        broken.write_text("void f(loc x) {x :-> 1<Imm>} {emp}", encoding="utf-8")
        assert main(["--config", CONFIG, "synth", str(broken)]) == 1
        assert "Imm" in capsys.readouterr().out

    def test_no_solution_exits_nonzero(self, tmp_path):
        spec = tmp_path / "bump.bossl"
        spec.write_text("void bump(loc x) {x :-> 1<a>} {x :-> 2<a>}", encoding="utf-8")
        assert main(["--config", CONFIG, "synth", str(spec)]) == 1

    def test_validate(self, capsys):
        assert main(["--config", CONFIG, "synth", PICK, "--validate", "20"]) == 0
        assert "20/20 samples passed" in capsys.readouterr().out

    def test_file_budgets_are_shown(self, capsys):
        source = str(CORPUS / "sorted-insert.bossl")
        assert main(["--config", CONFIG, "synth", source]) == 0
        out = capsys.readouterr().out
        assert "Budgets: unfold 1, close 2, calls 2" in out
        assert "sinsert(r, k);" in out

    def test_library_is_printed_once(self, capsys):
        source = str(CORPUS / "call_reset.bossl")
        assert main(["--config", CONFIG, "synth", source, "--library", "--validate", "10"]) == 0
        out = capsys.readouterr().out
        assert out.count("// reset: Synthesized") == 1
        assert "10/10 samples passed" in out

    def test_outputs(self, tmp_path):
        stats = tmp_path / "stats.csv"
        program = tmp_path / "pick.c"
        args = ["--config", CONFIG, "synth", PICK, "--mode", "mut", "--perturbation", "9"]
        args += ["--stats", str(stats), "--emit-c", str(program)]
        assert main(args) == 0
        (row,) = read_csv(stats)
        assert (row.name, row.mode, row.perturbation, row.outcome) == (
            "pick",
            "mut",
            9,
            "Synthesized",
        )
        assert program.read_text(encoding="utf-8").startswith("void pick(loc x, loc y) {")


@pytest.mark.integration
def test_bench(tmp_path, capsys):
    output = tmp_path / "sweep.csv"
    args = ["--config", CONFIG, "bench", str(CORPUS), "--only", "pick", "--perturbations", "0,1"]
    args += ["--modes", "imm", "--jobs", "1", "--output", str(output)]
    assert main(args) == 0
    rows = read_csv(output)
    assert [(r.name, r.perturbation) for r in rows] == [("pick", 0), ("pick", 1)]
    assert "2 rows written" in capsys.readouterr().out


@pytest.mark.integration
def test_bench_unknown_benchmark(capsys):
    assert main(["--config", CONFIG, "bench", str(CORPUS), "--only", "nope"]) == 1
    assert "unknown benchmarks: nope" in capsys.readouterr().out


@pytest.mark.integration
def test_oracle(capsys):
    assert main(["--config", CONFIG, "oracle", "--samples", "60", "--seed", "4"]) == 0
    out = capsys.readouterr().out
    assert "60 tasks" in out
    assert "60 queries" in out
