import pytest

from contractsynth.core.errors import RejectedInputError, SolverError
from contractsynth.core.logic import And, Cmp, IntConst, Not, Or, Sort, Var, evaluate
from contractsynth.core.solver import Sat, SolverSession, Unknown, Unsat, logic_for

x, y = Var("x", Sort.INT), Var("y", Sort.INT)
p = Var("p", Sort.BOOL)


def test_logic_for_sorts():
    assert logic_for([Sort.INT, Sort.BOOL]) == "QF_LIA"
    assert logic_for([Sort.REAL]) == "QF_LRA"
    assert logic_for([Sort.BOOL]) == "QF_LRA"
    assert logic_for([Sort.INT, Sort.REAL]) == "ALL"


def test_missing_binary_is_a_solver_error():
    with pytest.raises(SolverError):
        SolverSession(["/nonexistent/solver-binary"])


def test_sat_returns_a_total_model(session):
    f = And((Cmp(">", x, IntConst(2)), Cmp("<", x, IntConst(4)), Or((p, Not(p)))))
    session.ensure_declared([y])
    session.assert_formula(f)
    result = session.check_sat()
    assert isinstance(result, Sat)
    assert result.model["x"] == 3
    assert "y" in result.model and "p" in result.model
    assert evaluate(f, result.model)


def test_scopes_retract_assertions_and_declarations(session):
    session.assert_formula(Cmp(">", x, IntConst(0)))
    with session.scope():
        session.assert_formula(Cmp("<", x, IntConst(0)))
        assert isinstance(session.check_sat(), Unsat)
        assert session.depth == 1
    assert session.depth == 0
    assert isinstance(session.check_sat(), Sat)
    with session.scope():
        session.declare(y)
        assert session.is_declared("y")
    assert not session.is_declared("y")


def test_declaration_conflicts_are_rejected(session):
    session.declare(x)
    with pytest.raises(RejectedInputError):
        session.declare(x)
    with pytest.raises(RejectedInputError):
        session.ensure_declared([Var("x", Sort.BOOL)])
    with pytest.raises(RejectedInputError):
        session.pop()


def test_check_valid(session):
    session.assert_formula(Cmp(">", x, IntConst(5)))
    assert session.check_valid(Cmp(">", x, IntConst(0))) is True
    assert session.check_valid(Cmp(">", x, IntConst(6))) is False


def test_dead_process_yields_unknown(solver_cmd):
    s = SolverSession(solver_cmd, "QF_LIA", name="victim")
    s.kill("killed by test")
    result = s.check_sat()
    assert isinstance(result, Unknown)
    assert not s.alive
    s.close()
