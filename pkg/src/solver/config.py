from __future__ import annotations

import os
import shlex
import shutil
from dataclasses import dataclass
from pathlib import Path

try:
    from dotenv import load_dotenv
    # Load .env file from project root
    env_path = Path(__file__).resolve().parents[2] / ".env"
    if env_path.exists():
        load_dotenv(env_path)
except ImportError:
    pass


@dataclass(frozen=True)
class SmtConfig:
    binary: str
    args: tuple[str, ...]
    timeout_s: float

    def command(self) -> list[str]:
        return [self.binary, *self.args]


def load_smt_config(timeout_s: float) -> SmtConfig | None:
    """
    External prover settings from BOSSL_SMT / BOSSL_SMT_ARGS.

    Returns None when BOSSL_SMT is unset, which disables the escape hatch.
    """
    binary = os.environ.get("BOSSL_SMT")
    if not binary:
        return None
    resolved = shutil.which(binary) or (binary if Path(binary).exists() else None)
    if resolved is None:
        raise ValueError(f"BOSSL_SMT points to a missing solver binary: {binary}")
    args_raw = os.environ.get("BOSSL_SMT_ARGS", "")
    try:
        args = tuple(shlex.split(args_raw))
    except ValueError as exc:
        raise ValueError("BOSSL_SMT_ARGS must be a shell-style argument list.") from exc
    return SmtConfig(binary=resolved, args=args, timeout_s=timeout_s)
