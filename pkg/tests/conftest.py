"""
Shared fixtures: corpus paths, parsed corpus specs and the project config.
"""
from __future__ import annotations

from pathlib import Path

import pytest

from src.config import BosslConfig, load_config
from src.specparser import SpecFile, load_spec

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def config() -> BosslConfig:
    return load_config(ROOT / "config.yml")


@pytest.fixture(scope="session")
def spec():
    """Parsed corpus file by file name, cached for the session."""
    cache: dict[str, SpecFile] = {}

    def load(name: str) -> SpecFile:
        if name not in cache:
            cache[name] = load_spec(CORPUS / name)
        return cache[name]

    return load


@pytest.fixture
def write_config(tmp_path):
    """Writes config.yml text to a temp file and returns its path."""

    def write(text: str) -> Path:
        path = tmp_path / "config.yml"
        path.write_text(text, encoding="utf-8")
        return path

    return write
