"""
Tests for strict configuration loading.
"""
from __future__ import annotations

import pytest

from src.config import PERTURBATIONS, RULE_ORDERS, load_config

from .conftest import ROOT

pytestmark = pytest.mark.unit


def _config_text() -> str:
    return (ROOT / "config.yml").read_text(encoding="utf-8")


def test_project_config_loads(config):
    assert config.search.mode == "imm"
    assert config.search.timeout_ms == 120000
    assert config.search.perturbation == 0
    assert config.interpreter.unfold_depth == config.interpreter.max_list_length + 1
    assert config.bench.get_corpus_dir_path().name == "corpus"


def test_missing_file_is_reported(tmp_path):
    with pytest.raises(FileNotFoundError, match="Configuration file not found"):
        load_config(tmp_path / "absent.yml")


def test_empty_file_is_rejected(write_config):
    with pytest.raises(ValueError, match="empty"):
        load_config(write_config(""))


def test_missing_section_is_rejected(write_config):
    text = _config_text().replace("bench:", "benchmarks:")
    with pytest.raises(KeyError, match="bench"):
        load_config(write_config(text))


def test_missing_parameter_is_rejected(write_config):
    lines = [line for line in _config_text().splitlines() if "fuel:" not in line]
    with pytest.raises(TypeError, match="fuel"):
        load_config(write_config("\n".join(lines)))


def test_unknown_mode_is_rejected(write_config):
    text = _config_text().replace('mode: "imm"', 'mode: "ro"')
    with pytest.raises(ValueError, match="search.mode"):
        load_config(write_config(text))


def test_non_positive_budget_is_rejected(write_config):
    text = _config_text().replace("max_cubes: 64", "max_cubes: 0")
    with pytest.raises(ValueError, match="max_cubes"):
        load_config(write_config(text))


def test_perturbation_ids_cover_both_orders(config):
    seen = set()
    for perturbation in range(PERTURBATIONS):
        search = config.search.with_perturbation(perturbation)
        assert search.perturbation == perturbation
        seen.add((search.unif_order, search.rule_order))
    assert len(seen) == PERTURBATIONS
    assert config.search.with_perturbation(RULE_ORDERS + 2).unif_order == 1


def test_out_of_range_perturbation(config):
    with pytest.raises(ValueError, match="perturbation"):
        config.search.with_perturbation(PERTURBATIONS)


def test_with_mode(config):
    assert config.search.with_mode("mut").mode == "mut"
    with pytest.raises(ValueError):
        config.search.with_mode("ro")


def test_with_budgets(config):
    raised = config.search.with_budgets([("max_close_depth", 2)])
    assert raised.max_close_depth == 2
    assert raised.max_unfold_depth == config.search.max_unfold_depth
    assert config.search.with_budgets(()) == config.search


@pytest.mark.parametrize(
    "budgets, message",
    [([("timeout_ms", 5)], "unknown search budget"), ([("max_unfold_depth", 0)], "positive")],
)
def test_bad_budgets(config, budgets, message):
    with pytest.raises(ValueError, match=message):
        config.search.with_budgets(budgets)
