import io
import json
import os
from fractions import Fraction

import pytest

from contractsynth.api import CommandLineApp, build_parser, main
from contractsynth.api.cli import (
    EXIT_ERROR,
    EXIT_FAIL,
    EXIT_OK,
    EXIT_UNKNOWN,
    exit_code,
    render_valuation,
    verdict_line,
)
from contractsynth.core.config import Config
from contractsynth.core.errors import InternalError
from contractsynth.services.realizability import Realizable, Unknown, Unrealizable

from conftest import contract_path


def invoke(*argv, solver=None):
    out = io.StringIO()
    code = CommandLineApp(Config(solver_command=solver), stdout=out).run(list(argv))
    return code, out.getvalue().splitlines()


def test_parser_defaults():
    args = build_parser().parse_args(["simulate", "c.lus"])
    assert (args.traces, args.length, args.seed) == (1000, 50, 42)
    assert args.max_k is None and args.check is False


def test_verdict_lines_and_exit_codes():
    assert verdict_line(Realizable(2, {}, ())) == "REALIZABLE k=2"
    assert verdict_line(Unrealizable(0, {})) == "UNREALIZABLE at depth 0"
    assert verdict_line(Unrealizable(0, {}, stage="init")) == "UNREALIZABLE at depth 0 (no initial state)"
    assert verdict_line(Unknown("extend_3", "timeout")) == "UNKNOWN (extend_3: timeout)"
    assert exit_code(Realizable(0, {}, ())) == EXIT_OK
    assert exit_code(Unrealizable(1, {})) == EXIT_FAIL
    assert exit_code(Unknown("bound", "bound exhausted")) == EXIT_UNKNOWN


def test_render_valuation():
    assert render_valuation({"x@in": 1, "p": True, "r": Fraction(1, 2)}) == "p=true, r=1/2, x@in=1"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate", "c.lus"],
        ["check"],
        ["check", "c.lus", "--max-k", "many"],
        ["check", "c.lus", "--max-k", "-1"],
        ["check", "c.lus", "--timeout-ms", "0"],
        ["simulate", "c.lus", "--traces", "-5"],
        ["simulate", "c.lus", "--seed", str(2**64)],
    ],
)
def test_usage_errors(argv):
    assert invoke(*argv) == (EXIT_ERROR, [])


def test_missing_contract_file(tmp_path):
    assert invoke("check", str(tmp_path / "absent.lus"))[0] == EXIT_ERROR


def test_malformed_contract(tmp_path):
    path = tmp_path / "bad.lus"
    path.write_text("node n() returns (; let tel;")
    assert invoke("check", str(path))[0] == EXIT_ERROR


def test_missing_solver():
    code, _ = invoke("check", contract_path("comparator.lus"), "--solver", "/nonexistent/solver")
    assert code == EXIT_ERROR


def test_bad_environment_fails_startup(monkeypatch):
    monkeypatch.setenv("SYNT_TIMEOUT_MS", "0")
    assert main(["check", contract_path("comparator.lus")]) == EXIT_ERROR


def _raise_internal(*args, **kwargs):
    raise InternalError("unprintable node")


def test_internal_errors_map_to_the_error_code(monkeypatch):
    monkeypatch.setattr("contractsynth.api.cli.load_problem", _raise_internal)
    assert invoke("check", contract_path("comparator.lus")) == (EXIT_ERROR, [])


def test_version_exits_cleanly():
    with pytest.raises(SystemExit) as info:
        invoke("--version")
    assert info.value.code == 0


# ------------------------------------------------------------------ solver-backed


def solver_args(solver_cmd):
    return ["--solver", " ".join(solver_cmd)]


def test_check_realizable(solver_cmd):
    code, lines = invoke("check", contract_path("repeats.lus"), *solver_args(solver_cmd))
    assert code == EXIT_OK
    assert lines == ["REALIZABLE k=1"]


def test_check_unrealizable_prints_a_witness(solver_cmd):
    code, lines = invoke("check", contract_path("comparator_unreal.lus"), *solver_args(solver_cmd))
    assert code == EXIT_FAIL
    assert lines[0] == "UNREALIZABLE at depth 0"
    assert lines[1].startswith("witness: ")


def test_check_with_exhausted_bound(solver_cmd):
    code, lines = invoke("check", contract_path("repeats.lus"), "--max-k", "0", *solver_args(solver_cmd))
    assert code == EXIT_UNKNOWN
    assert lines == ["UNKNOWN (bound: bound exhausted)"]


def test_check_with_certificates(solver_cmd):
    code, lines = invoke("check", contract_path("comparator.lus"), "--check", *solver_args(solver_cmd))
    assert code == EXIT_OK
    assert lines[0] == "REALIZABLE k=0" and lines[-1] == "CERTIFIED"


def test_synth_writes_c(solver_cmd, tmp_path):
    out = tmp_path / "gen" / "top.c"
    code, _ = invoke("synth", contract_path("repeats.lus"), "--out", str(out), *solver_args(solver_cmd))
    assert code == EXIT_OK
    source = out.read_text()
    assert "void top_step(int64_t in_x) {" in source
    assert "#define TOP_K 1" in source


def test_emitter_failure_is_an_error_not_a_verdict(solver_cmd, tmp_path, monkeypatch):
    monkeypatch.setattr("contractsynth.api.cli.emit", _raise_internal)
    out = tmp_path / "top.c"
    code, lines = invoke("synth", contract_path("repeats.lus"), "--out", str(out), *solver_args(solver_cmd))
    assert code == EXIT_ERROR
    assert lines == ["REALIZABLE k=1"]
    assert not out.exists()


def test_synth_defaults_to_the_node_name(solver_cmd, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _ = invoke("synth", contract_path("comparator.lus"), *solver_args(solver_cmd))
    assert code == EXIT_OK
    assert os.path.exists(tmp_path / "comparator.c")


def test_unrealizable_synth_writes_nothing(solver_cmd, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _ = invoke("synth", contract_path("comparator_unreal.lus"), *solver_args(solver_cmd))
    assert code == EXIT_FAIL
    assert os.listdir(tmp_path) == []


def test_dumped_skolems_certify(solver_cmd, tmp_path):
    bundle = tmp_path / "repeats.json"
    queries = tmp_path / "queries"
    args = solver_args(solver_cmd)
    code, _ = invoke(
        "check", contract_path("repeats.lus"), "--dump-skolem", str(bundle), "--dump-queries", str(queries), *args
    )
    assert code == EXIT_OK
    assert sorted(os.listdir(queries)) == ["base_0.smt2", "extend_0.smt2", "extend_1.smt2"]
    code, lines = invoke("certify", contract_path("repeats.lus"), str(bundle), *args)
    assert code == EXIT_OK
    assert lines[0] == "initial state: ok" and lines[-1] == "CERTIFIED"
    code, _ = invoke("certify", contract_path("comparator.lus"), str(bundle), *args)
    assert code == EXIT_ERROR


def test_truncated_skolems_are_rejected(solver_cmd, tmp_path):
    bundle = tmp_path / "repeats.json"
    args = solver_args(solver_cmd)
    assert invoke("check", contract_path("repeats.lus"), "--dump-skolem", str(bundle), *args)[0] == EXIT_OK
    doc = json.loads(bundle.read_text())
    del doc["skolems"][-1]
    bundle.write_text(json.dumps(doc))
    code, lines = invoke("certify", contract_path("repeats.lus"), str(bundle), *args)
    assert code == EXIT_ERROR
    assert "CERTIFIED" not in lines


def test_simulate(solver_cmd):
    code, lines = invoke(
        "simulate", contract_path("comparator.lus"), "--traces", "10", "--len", "5", *solver_args(solver_cmd)
    )
    assert code == EXIT_OK
    assert lines[0] == "REALIZABLE k=0"
    assert "PASS 10/10" in lines
