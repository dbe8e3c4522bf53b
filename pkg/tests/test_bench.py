"""
Tests for the benchmark corpus, CSV records, sweep runner and statistics.
"""
from __future__ import annotations

import pytest

from src.bench import (
    CSV_HEADER,
    ERROR,
    Benchmark,
    BenchRecord,
    format_summary,
    load_corpus,
    log2_iqr,
    plan_jobs,
    read_csv,
    run_job,
    run_sweep,
    summarize,
    write_csv,
)
from src.config import PERTURBATIONS


def record(perturbation=0, rules=10, outcome="Synthesized", mode="imm", program="p", **fields):
    values = {
        "name": "lcopy",
        "variant": "shape",
        "mode": mode,
        "perturbation": perturbation,
        "time_ms": 12.5,
        "ast_size": 20 if outcome == "Synthesized" else None,
        "rules": rules,
        "backtracks": 1 if rules is not None else None,
        "outcome": outcome,
        "program": program,
    }
    values.update(fields)
    return BenchRecord(**values)


@pytest.mark.unit
class TestRecords:
    def test_header(self, tmp_path):
        path = write_csv([record()], tmp_path / "out" / "run.csv")
        first = path.read_text(encoding="utf-8").splitlines()[0]
        assert first == "name,variant,mode,perturbation,time_ms,ast_size,rules,backtracks,outcome"
        assert tuple(first.split(",")) == CSV_HEADER

    def test_timeout_row_leaves_fields_blank(self, tmp_path):
        timeout = record(perturbation=3, rules=None, outcome="Timeout", program="")
        path = write_csv([timeout], tmp_path / "run.csv")
        row = path.read_text(encoding="utf-8").splitlines()[1]
        assert row == "lcopy,shape,imm,3,12.5,,,,Timeout"

    def test_rows_are_sorted_and_read_back(self, tmp_path):
        rows = [record(5, mode="mut"), record(2), record(0, rules=None, outcome="Timeout")]
        path = write_csv(rows, tmp_path / "run.csv")
        loaded = read_csv(path)
        assert [(r.mode, r.perturbation) for r in loaded] == [("imm", 0), ("imm", 2), ("mut", 5)]
        assert loaded[0].rules is None
        assert loaded[1] == rows[1]

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("name,mode\nx,imm\n", encoding="utf-8")
        with pytest.raises(ValueError, match="bad.csv:1"):
            read_csv(path)

    def test_bad_row_names_its_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        lines = [",".join(CSV_HEADER), "lcopy,shape,imm,0,1.0,5,5,0,Synthesized"]
        lines.append("lcopy,shape,imm,42,1.0,5,5,0,Synthesized")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="bad.csv:3: perturbation"):
            read_csv(path)

    def test_unknown_outcome(self, tmp_path):
        path = tmp_path / "bad.csv"
        lines = [",".join(CSV_HEADER), "lcopy,shape,imm,0,1.0,5,5,0,Crashed"]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="unknown outcome"):
            read_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_csv(tmp_path / "absent.csv")


@pytest.mark.unit
class TestSummary:
    def test_log2_iqr(self):
        assert log2_iqr([4, 8, 16, 32]) == pytest.approx(1.5)
        assert log2_iqr([7]) == 0.0

    def test_summarize(self):
        rows = [record(i, rules=r) for i, r in enumerate([4, 8, 16, 32])]
        rows.append(record(4, rules=None, outcome="Timeout", program=""))
        rows.append(record(0, rules=50, mode="mut", program="q"))
        imm, mut = summarize(rows)
        assert (imm.mode, imm.runs, imm.timeouts) == ("imm", 5, 1)
        assert (imm.min_rules, imm.median_rules, imm.max_rules) == (4, 12, 32)
        assert imm.log2_iqr == pytest.approx(1.5)
        assert imm.distinct_asts == 1
        assert mut.runs == 1 and mut.median_rules == 50

    def test_rows_from_csv_have_no_ast_count(self, tmp_path):
        path = write_csv([record()], tmp_path / "run.csv")
        (summary,) = summarize(read_csv(path))
        assert summary.distinct_asts is None

    def test_format(self):
        table = format_summary(summarize([record()]))
        assert table.splitlines()[0].startswith("benchmark")
        assert "lcopy" in table


@pytest.mark.unit
class TestCorpus:
    def test_manifest(self, corpus_dir):
        benchmarks = load_corpus(corpus_dir)
        names = {b.name for b in benchmarks}
        assert {"pick", "listcopy", "reset", "lcopy", "lseg-append", "sorted-insert"} <= names
        assert {"tcopy", "tcopy-ptr"} <= names
        swept = {(b.name, b.variant) for b in benchmarks if b.sweep}
        assert ("lcopy", "all") in swept and ("tcopy-ptr", "val") in swept
        assert ("lcopy", "shape") not in swept
        assert ("sorted-insert", "sorted") in swept
        assert all(b.path.exists() for b in benchmarks)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="manifest"):
            load_corpus(tmp_path)

    def test_bad_variant(self, tmp_path):
        (tmp_path / "a.bossl").write_text("", encoding="utf-8")
        (tmp_path / "manifest.yml").write_text(
            "benchmarks:\n  - {name: a, variant: fancy, file: a.bossl, sweep: false}\n",
            encoding="utf-8",
        )
        with pytest.raises(ValueError, match="unknown variant"):
            load_corpus(tmp_path)

    def test_missing_key(self, tmp_path):
        (tmp_path / "manifest.yml").write_text(
            "benchmarks:\n  - {name: a, variant: shape}\n", encoding="utf-8"
        )
        with pytest.raises(ValueError, match="lacks file, sweep"):
            load_corpus(tmp_path)


@pytest.mark.integration
class TestRunner:
    def _pick(self, corpus_dir):
        return [b for b in load_corpus(corpus_dir) if b.name == "pick"]

    def test_pick_sweep_plan(self, corpus_dir, config):
        jobs = plan_jobs(
            self._pick(corpus_dir), config.search, config.solver, range(PERTURBATIONS)
        )
        assert len(jobs) == 84

    def test_run_job(self, corpus_dir, config):
        benchmarks = self._pick(corpus_dir)
        (job,) = plan_jobs(benchmarks, config.search, config.solver, [0], ["imm"], False)
        row = run_job(job)
        assert row.outcome == "Synthesized"
        assert row.backtracks == 0
        assert "*x = 30;" in row.program
        assert row.violations == 0

    def test_failed_run_is_a_row(self, tmp_path, config):
        broken = tmp_path / "broken.bossl"
        broken.write_text("void f(loc x) {x :-> }", encoding="utf-8")
        bench = Benchmark("broken", "shape", broken, False)
        (job,) = plan_jobs([bench], config.search, config.solver, [0], ["imm"], False)
        row = run_job(job)
        assert row.outcome == ERROR
        assert row.rules is None

    def test_sweep_rows_are_sorted(self, corpus_dir, config):
        benchmarks = self._pick(corpus_dir)
        jobs = plan_jobs(benchmarks, config.search, config.solver, [3, 0], use_smt=False)
        seen = []
        rows = run_sweep(jobs, workers=1, progress=seen.append)
        assert len(seen) == 4
        assert [(r.mode, r.perturbation) for r in rows] == [
            ("imm", 0),
            ("imm", 3),
            ("mut", 0),
            ("mut", 3),
        ]
