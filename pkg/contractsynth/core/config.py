from __future__ import annotations
import os
import shlex
import shutil
from dataclasses import dataclass
from typing import List, Optional

from dotenv import load_dotenv

from .errors import ConfigError, SolverNotFoundError

load_dotenv()

_TRUTHY = {"1", "true", "yes"}

# Tried in order when neither --solver nor SYNT_SOLVER is given.
_SOLVER_CONVENTIONS = [
    ["z3", "-in", "-smt2"],
    ["cvc5", "--incremental", "--produce-models", "--lang", "smt2"],
]


@dataclass
class Config:
    solver_command: Optional[str]
    max_k: int = 8
    timeout_ms: int = 30000
    mbp_cap: int = 512
    inline: bool = True
    check: bool = False
    log_level: str = "INFO"
    log_json: bool = False
    cc: str = "cc"


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")


def _bool_env(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.lower() in _TRUTHY


def load_config() -> Config:
    cfg = Config(
        solver_command=os.getenv("SYNT_SOLVER"),
        max_k=_int_env("SYNT_MAX_K", 8),
        timeout_ms=_int_env("SYNT_TIMEOUT_MS", 30000),
        mbp_cap=_int_env("SYNT_MBP_CAP", 512),
        inline=_bool_env("SYNT_INLINE", True),
        check=_bool_env("SYNT_CHECK", False),
        log_level=os.getenv("SYNT_LOG_LEVEL", "INFO").upper(),
        log_json=_bool_env("SYNT_LOG_JSON", False),
        cc=os.getenv("SYNT_CC", "cc"),
    )
    validate_config(cfg)
    return cfg


def validate_config(cfg: Config) -> None:
    if cfg.max_k < 0:
        raise ConfigError("max_k must be >= 0")
    if cfg.timeout_ms <= 0:
        raise ConfigError("timeout_ms must be > 0")
    if cfg.mbp_cap <= 0:
        raise ConfigError("mbp_cap must be > 0")


def resolve_solver_command(explicit: Optional[str] = None) -> List[str]:
    """Return the argv of the SMT solver to spawn.

    The explicit value (``--solver``) wins over ``SYNT_SOLVER``; without
    either, the first conventional solver found on PATH is used.
    """
    command = explicit or os.getenv("SYNT_SOLVER")
    if command:
        argv = shlex.split(command)
        if not argv:
            raise SolverNotFoundError("empty solver command")
        if shutil.which(argv[0]) is None and not os.access(argv[0], os.X_OK):
            raise SolverNotFoundError(
                f"solver binary {argv[0]!r} not found. Install it or pass --solver / set SYNT_SOLVER."
            )
        return argv
    for candidate in _SOLVER_CONVENTIONS:
        if shutil.which(candidate[0]):
            return list(candidate)
    raise SolverNotFoundError(
        "no SMT solver found. Install z3 or cvc5, or pass --solver '<cmd>' / set SYNT_SOLVER."
    )
