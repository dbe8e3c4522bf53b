"""
Benchmark corpus manifest (``corpus/manifest.yml``).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import yaml

from .records import VARIANTS

logger = logging.getLogger(__name__)

MANIFEST = "manifest.yml"


@dataclass(frozen=True)
class Benchmark:
    name: str
    variant: str
    path: Path
    sweep: bool


def load_corpus(corpus_dir: str | Path) -> list[Benchmark]:
    """
    Raises:
        FileNotFoundError: missing directory, manifest or listed spec file
        ValueError: malformed manifest entry
    """
    root = Path(corpus_dir)
    manifest = root / MANIFEST
    if not manifest.exists():
        raise FileNotFoundError(f"Corpus manifest not found: {manifest}")
    with manifest.open(encoding="utf-8") as handle:
        data = yaml.safe_load(handle)
    if not data or "benchmarks" not in data:
        raise ValueError(f"{manifest}: missing 'benchmarks' list")

    benchmarks: list[Benchmark] = []
    seen: set[tuple[str, str]] = set()
    for index, entry in enumerate(data["benchmarks"], start=1):
        missing = [key for key in ("name", "variant", "file", "sweep") if key not in entry]
        if missing:
            raise ValueError(f"{manifest}: entry {index} lacks {', '.join(missing)}")
        if entry["variant"] not in VARIANTS:
            raise ValueError(f"{manifest}: entry {index} has unknown variant {entry['variant']!r}")
        key = (entry["name"], entry["variant"])
        if key in seen:
            raise ValueError(f"{manifest}: duplicate benchmark {key[0]} ({key[1]})")
        seen.add(key)
        path = root / entry["file"]
        if not path.exists():
            raise FileNotFoundError(f"{manifest}: entry {index} names missing file {path}")
        benchmarks.append(Benchmark(entry["name"], entry["variant"], path, bool(entry["sweep"])))
    logger.debug("Loaded %d benchmarks from %s", len(benchmarks), manifest)
    return benchmarks


def negative_specs(corpus_dir: str | Path) -> list[Path]:
    """Spec files that the front end must reject."""
    return sorted((Path(corpus_dir) / "negative").glob("*.bossl"))
