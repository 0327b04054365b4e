import io
import json
import logging
import stat

import pytest

from contractsynth import create_app
from contractsynth.api import CommandLineApp
from contractsynth.core.config import Config, load_config, resolve_solver_command, validate_config
from contractsynth.core.errors import ConfigError, SolverNotFoundError
from contractsynth.core.logs import configure_logging

ENV = (
    "SYNT_SOLVER",
    "SYNT_MAX_K",
    "SYNT_TIMEOUT_MS",
    "SYNT_MBP_CAP",
    "SYNT_INLINE",
    "SYNT_CHECK",
    "SYNT_LOG_LEVEL",
    "SYNT_LOG_JSON",
    "SYNT_CC",
)


@pytest.fixture
def clean_env(monkeypatch):
    for name in ENV:
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


@pytest.fixture
def restore_logging():
    yield
    configure_logging("WARNING")


def fake_binary(directory, name):
    path = directory / name
    path.write_text("#!/bin/sh\nexit 0\n")
    path.chmod(path.stat().st_mode | stat.S_IXUSR)
    return path


def test_defaults(clean_env):
    cfg = load_config()
    assert (cfg.max_k, cfg.timeout_ms, cfg.mbp_cap) == (8, 30000, 512)
    assert cfg.inline is True and cfg.check is False
    assert cfg.log_level == "INFO"
    assert cfg.cc == "cc"


def test_environment_overrides(clean_env):
    clean_env.setenv("SYNT_MAX_K", "3")
    clean_env.setenv("SYNT_INLINE", "no")
    clean_env.setenv("SYNT_CHECK", "yes")
    clean_env.setenv("SYNT_LOG_LEVEL", "debug")
    clean_env.setenv("SYNT_CC", "clang")
    cfg = load_config()
    assert cfg.max_k == 3 and cfg.inline is False and cfg.check is True
    assert cfg.log_level == "DEBUG"
    assert cfg.cc == "clang"


@pytest.mark.parametrize(
    "name, value", [("SYNT_MAX_K", "lots"), ("SYNT_MAX_K", "-1"), ("SYNT_MBP_CAP", "0"), ("SYNT_TIMEOUT_MS", "-5")]
)
def test_invalid_environment(clean_env, name, value):
    clean_env.setenv(name, value)
    with pytest.raises(ConfigError):
        load_config()


def test_validate_config():
    validate_config(Config(solver_command=None))
    with pytest.raises(ConfigError):
        validate_config(Config(solver_command=None, max_k=-2))


def test_explicit_solver_command(clean_env, tmp_path):
    fake_binary(tmp_path, "mysolver")
    clean_env.setenv("PATH", str(tmp_path))
    assert resolve_solver_command("mysolver --smt2 -in") == ["mysolver", "--smt2", "-in"]
    clean_env.setenv("SYNT_SOLVER", "mysolver -q")
    assert resolve_solver_command() == ["mysolver", "-q"]


def test_conventional_solver_is_found_on_path(clean_env, tmp_path):
    fake_binary(tmp_path, "cvc5")
    clean_env.setenv("PATH", str(tmp_path))
    assert resolve_solver_command()[0] == "cvc5"
    fake_binary(tmp_path, "z3")
    assert resolve_solver_command() == ["z3", "-in", "-smt2"]


def test_missing_solvers(clean_env, tmp_path):
    clean_env.setenv("PATH", str(tmp_path))
    with pytest.raises(SolverNotFoundError):
        resolve_solver_command()
    with pytest.raises(SolverNotFoundError):
        resolve_solver_command("absent-solver")
    with pytest.raises(SolverNotFoundError):
        resolve_solver_command("   ")


def test_json_logging(restore_logging):
    stream = io.StringIO()
    configure_logging("debug", json_output=True, stream=stream)
    logging.getLogger("contractsynth.services.realizability").info("realizable with k=%d", 2)
    record = json.loads(stream.getvalue().splitlines()[-1])
    assert record["message"] == "realizable with k=2"
    assert record["levelname"] == "INFO"
    assert record["name"] == "contractsynth.services.realizability"


def test_text_logging_replaces_handlers(restore_logging):
    first, second = io.StringIO(), io.StringIO()
    configure_logging("INFO", stream=first)
    logger = configure_logging("WARNING", stream=second)
    assert len(logger.handlers) == 1
    logging.getLogger("contractsynth.core").info("hidden")
    logging.getLogger("contractsynth.core").warning("shown")
    assert first.getvalue() == ""
    assert "WARNING contractsynth.core: shown" in second.getvalue()


def test_create_app(clean_env, restore_logging):
    app = create_app()
    assert isinstance(app, CommandLineApp)
    assert app.cfg.max_k == 8
