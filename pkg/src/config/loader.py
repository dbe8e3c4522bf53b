"""
Configuration loader for the BoSSL synthesizer.

All configuration parameters must be explicitly defined in config.yml.
No default values or fallback mechanisms are used.
Missing parameters will cause immediate failure.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import yaml

from .models import (
    MODES,
    RULE_ORDERS,
    UNIF_ORDERS,
    BenchConfig,
    BosslConfig,
    InterpreterConfig,
    LoggingConfig,
    SearchConfig,
    SolverConfig,
    ValidationConfig,
)


def _check_required_params(data: dict[str, Any], params: list[str], section: str) -> None:
    """
    Check that all required parameters exist in the data.

    Raises:
        TypeError: If any required parameter is missing
    """
    missing = [p for p in params if p not in data]
    if missing:
        raise TypeError(
            f"Missing required parameters in '{section}' section: {', '.join(missing)}. "
            f"All parameters must be explicitly defined in config.yml."
        )


def _check_positive(data: dict[str, Any], params: list[str], section: str) -> None:
    for param in params:
        value = data[param]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise ValueError(f"'{section}.{param}' must be a positive number, got {value!r}")


def load_config(config_path: str | Path = "config.yml") -> BosslConfig:
    """
    Load configuration from YAML file strictly.

    Args:
        config_path: Path to config.yml file (relative to project root)

    Returns:
        BosslConfig object with configuration from file

    Raises:
        FileNotFoundError: If config file does not exist
        KeyError: If required configuration section is missing
        TypeError: If required parameter is missing within a section
        ValueError: If the file is empty or a parameter is out of range
    """
    config_file = Path(config_path)

    if not config_file.exists():
        raise FileNotFoundError(
            f"Configuration file not found: {config_file}. "
            "All configuration must be explicitly defined in config.yml."
        )

    with open(config_file, "r", encoding="utf-8") as f:
        yaml_data = yaml.safe_load(f)

    if yaml_data is None:
        raise ValueError(
            f"Configuration file is empty: {config_file}. "
            "All configuration must be explicitly defined."
        )

    # Build configuration strictly - all sections must exist
    required_sections = ["search", "solver", "interpreter", "validation", "bench", "logging"]
    missing_sections = [s for s in required_sections if s not in yaml_data]
    if missing_sections:
        raise KeyError(
            f"Missing required configuration sections: {', '.join(missing_sections)}. "
            "All sections must be defined in config.yml."
        )

    return BosslConfig(
        search=_load_search_config(yaml_data["search"]),
        solver=_load_solver_config(yaml_data["solver"]),
        interpreter=_load_interpreter_config(yaml_data["interpreter"]),
        validation=_load_validation_config(yaml_data["validation"]),
        bench=_load_bench_config(yaml_data["bench"]),
        logging=_load_logging_config(yaml_data["logging"]),
    )


def _load_search_config(data: dict[str, Any]) -> SearchConfig:
    """Load search configuration strictly"""
    required_params = [
        "mode", "unif_order", "rule_order", "timeout_ms",
        "max_unfold_depth", "max_close_depth", "max_calls_per_path", "max_derivation_depth",
    ]
    _check_required_params(data, required_params, "search")
    if data["mode"] not in MODES:
        raise ValueError(f"'search.mode' must be one of {', '.join(MODES)}, got {data['mode']!r}")
    if data["unif_order"] not in range(UNIF_ORDERS):
        raise ValueError(f"'search.unif_order' must be in 0..{UNIF_ORDERS - 1}")
    if data["rule_order"] not in range(RULE_ORDERS):
        raise ValueError(f"'search.rule_order' must be in 0..{RULE_ORDERS - 1}")
    _check_positive(data, required_params[3:], "search")
    return SearchConfig(
        mode=data["mode"],
        unif_order=data["unif_order"],
        rule_order=data["rule_order"],
        timeout_ms=data["timeout_ms"],
        max_unfold_depth=data["max_unfold_depth"],
        max_close_depth=data["max_close_depth"],
        max_calls_per_path=data["max_calls_per_path"],
        max_derivation_depth=data["max_derivation_depth"],
    )


def _load_solver_config(data: dict[str, Any]) -> SolverConfig:
    """Load solver configuration strictly"""
    required_params = ["max_cubes", "max_fm_constraints", "set_enum_universe", "smt_timeout_s"]
    _check_required_params(data, required_params, "solver")
    _check_positive(data, required_params, "solver")
    return SolverConfig(
        max_cubes=data["max_cubes"],
        max_fm_constraints=data["max_fm_constraints"],
        set_enum_universe=data["set_enum_universe"],
        smt_timeout_s=float(data["smt_timeout_s"]),
    )


def _load_interpreter_config(data: dict[str, Any]) -> InterpreterConfig:
    """Load interpreter configuration strictly"""
    required_params = ["max_list_length", "max_value", "fuel", "model_attempts"]
    _check_required_params(data, required_params, "interpreter")
    _check_positive(data, required_params, "interpreter")
    return InterpreterConfig(
        max_list_length=data["max_list_length"],
        max_value=data["max_value"],
        fuel=data["fuel"],
        model_attempts=data["model_attempts"],
    )


def _load_validation_config(data: dict[str, Any]) -> ValidationConfig:
    """Load validation configuration strictly"""
    _check_required_params(data, ["samples", "seed"], "validation")
    _check_positive(data, ["samples"], "validation")
    return ValidationConfig(samples=data["samples"], seed=data["seed"])


def _load_bench_config(data: dict[str, Any]) -> BenchConfig:
    """Load benchmark configuration strictly"""
    _check_required_params(data, ["corpus_dir", "output_csv", "jobs", "summary"], "bench")
    _check_positive(data, ["jobs"], "bench")
    return BenchConfig(
        corpus_dir=data["corpus_dir"],
        output_csv=data["output_csv"],
        jobs=data["jobs"],
        summary=bool(data["summary"]),
    )


def _load_logging_config(data: dict[str, Any]) -> LoggingConfig:
    """Load logging configuration strictly"""
    _check_required_params(data, ["level", "format"], "logging")
    level = str(data["level"]).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ValueError(f"'logging.level' is not a logging level: {data['level']!r}")
    return LoggingConfig(level=level, format=data["format"])


def configure_logging(config: LoggingConfig) -> None:
    """Configure the root logger once from the logging section."""
    logging.basicConfig(level=config.level, format=config.format)
