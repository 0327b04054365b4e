import os

import pytest

from contractsynth.core.config import resolve_solver_command
from contractsynth.core.errors import SolverNotFoundError
from contractsynth.core.logic import TRUE, Add, IntConst, Sort, Var
from contractsynth.core.solver import SolverSession
from contractsynth.services.frontend import load_problem
from contractsynth.services.harness.differential import find_compiler
from contractsynth.services.realizability import Realizable, build_base_check, build_extend_check
from contractsynth.services.skolem import GuardedSkolem, SkolemCase

CONTRACTS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "contracts")


def contract_path(name: str) -> str:
    return os.path.join(CONTRACTS, name)


def read_contract(name: str) -> str:
    with open(contract_path(name), "r", encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture
def load_contract():
    def load(name: str, inline: bool = True):
        return load_problem(read_contract(name), inline=inline)

    return load


@pytest.fixture(scope="session")
def solver_cmd():
    try:
        return resolve_solver_command()
    except SolverNotFoundError as exc:
        pytest.skip(str(exc))


@pytest.fixture
def session(solver_cmd):
    with SolverSession(solver_cmd, "ALL", timeout_ms=30000, name="test") as s:
        yield s


@pytest.fixture(scope="session")
def cc():
    compiler = find_compiler()
    if compiler is None:
        pytest.skip("no C compiler on PATH")
    return compiler


ECHO = """
node echo(a : int) returns (b : int);
let
  b = a;
  --%REALIZABLE a;
tel;
"""


def echo_result(k: int = 0, offset: int = 0, guard=None, source: str = ECHO):
    """Hand-written implementation of ``echo`` with history depth ``k``; ``offset`` breaks it.

    Every output of ``source`` copies the input ``a``.
    """
    p = load_problem(source)
    a_in = Var("a@in", Sort.INT)
    copy = Add((a_in, IntConst(offset))) if offset else a_in
    assigns = {"a@next": a_in}
    assigns.update({f"{v.name}@next": copy for v in p.state if v.name != "a"})
    case = SkolemCase(guard if guard is not None else TRUE, assigns)
    checks = [build_base_check(p, j) for j in range(k)] + [build_extend_check(p, k)]
    skolems = tuple(GuardedSkolem(c.kind, c.depth, c.universals, c.existentials, [case]) for c in checks)
    return p, Realizable(k, {v.name: 0 for v in p.state}, skolems, tuple(checks))
