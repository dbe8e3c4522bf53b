from __future__ import annotations

from pathlib import Path

from ..core import Procedure
from .lexer import SpecParseError
from .parser import SpecFile, parse_program, parse_spec


def load_spec(path: str | Path) -> SpecFile:
    """Read and parse a ``.bossl`` file; syntax errors name the file."""
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Spec file not found: {file_path}")
    text = file_path.read_text(encoding="utf-8")
    try:
        return parse_spec(text)
    except SpecParseError as exc:
        raise SpecParseError(f"{file_path}: {exc.reason}", exc.line, exc.col) from exc


def load_program(path: str | Path) -> list[Procedure]:
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Program file not found: {file_path}")
    return parse_program(file_path.read_text(encoding="utf-8"))
