from fractions import Fraction

import pytest

from contractsynth.core.errors import RejectedInputError
from contractsynth.core.logic import (
    Add,
    And,
    Cmp,
    FIte,
    Iff,
    IntConst,
    IntDiv,
    Ite,
    Neg,
    Not,
    Or,
    RealConst,
    Scale,
    Sort,
    Var,
    evaluate,
)
from contractsynth.core.smtlib import (
    declaration,
    parse_expr,
    parse_formula,
    parse_model,
    parse_term,
    parse_value,
    print_value,
    read_sexpr,
    symbol,
    to_smtlib,
)

SORTS = {
    "x": Sort.INT,
    "y": Sort.INT,
    "r": Sort.REAL,
    "p": Sort.BOOL,
    "bias@1": Sort.INT,
    "x@in{1}": Sort.INT,
}
x, y = Var("x", Sort.INT), Var("y", Sort.INT)
r, p = Var("r", Sort.REAL), Var("p", Sort.BOOL)


def test_symbols_are_quoted_only_when_needed():
    assert symbol("bias@1") == "bias@1"
    assert symbol("x@in{1}") == "|x@in{1}|"
    assert declaration(Var("x@in{1}", Sort.INT)) == "(declare-fun |x@in{1}| () Int)"
    with pytest.raises(RejectedInputError):
        symbol("a|b")


def test_printing_numbers():
    assert to_smtlib(IntConst(-3)) == "(- 3)"
    assert to_smtlib(RealConst(Fraction(1, 3))) == "(/ 1.0 3.0)"
    assert to_smtlib(RealConst(Fraction(-2))) == "(- 2.0)"
    assert print_value(True, Sort.BOOL) == "true"
    assert print_value(Fraction(5, 2), Sort.REAL) == "(/ 5.0 2.0)"


def test_printing_connectives():
    f = And((Cmp("!=", x, y), Iff(p, Not(p))))
    assert to_smtlib(f) == "(and (distinct x y) (= p (not p)))"
    assert to_smtlib(IntDiv(x, 2)) == "(div x 2)"


@pytest.mark.parametrize(
    "expr",
    [
        And((Cmp("<=", x, Add((y, IntConst(1)))), Or((p, Not(p))))),
        Cmp(">", Scale(Fraction(1, 2), r), RealConst(Fraction(-7, 4))),
        Cmp("=", Ite(p, x, Neg(y)), IntDiv(x, 3)),
        FIte(p, Cmp("!=", x, y), Iff(p, p)),
        Cmp("=", Var("x@in{1}", Sort.INT), Var("bias@1", Sort.INT)),
    ],
)
def test_parse_inverts_print(expr):
    assert parse_expr(to_smtlib(expr), SORTS) == expr


def test_exact_rational_parsing():
    third = parse_term("(/ 1.0 3.0)", SORTS)
    assert evaluate(Scale(Fraction(3), third), {}) == 1


def test_reader_lifts_integer_literals_next_to_reals():
    assert parse_formula("(< r 1)", SORTS) == Cmp("<", r, RealConst(Fraction(1)))


def test_reader_rejections():
    with pytest.raises(RejectedInputError):
        parse_formula("(< x unknown)", SORTS)
    with pytest.raises(RejectedInputError):
        parse_formula("(+ x 1)", SORTS)
    with pytest.raises(RejectedInputError):
        parse_term("(* x y)", SORTS)
    with pytest.raises(RejectedInputError):
        parse_expr("(let ((a 1)) a)", SORTS)
    with pytest.raises(RejectedInputError):
        read_sexpr("(and p")


def test_parse_value_forms():
    assert parse_value("12", Sort.INT) == 12
    assert parse_value(["-", "4"], Sort.INT) == -4
    assert parse_value(["/", "1.0", "4.0"], Sort.REAL) == Fraction(1, 4)
    assert parse_value(["-", ["/", "3", "2"]], Sort.REAL) == Fraction(-3, 2)
    assert parse_value("false", Sort.BOOL) is False
    with pytest.raises(RejectedInputError):
        parse_value(["/", "1", "2"], Sort.INT)


def test_parse_model_ignores_unknown_and_function_entries():
    text = """(
      (define-fun x () Int (- 2))
      (define-fun r () Real (/ 3.0 4.0))
      (define-fun |x@in{1}| () Int 5)
      (define-fun p () Bool true)
      (define-fun aux () Int 9)
      (define-fun f ((a Int)) Int a)
    )"""
    model = parse_model(text, SORTS)
    assert model == {"x": -2, "r": Fraction(3, 4), "x@in{1}": 5, "p": True}


def test_parse_model_accepts_model_keyword():
    assert parse_model("(model (define-fun y () Int 0))", SORTS) == {"y": 0}
