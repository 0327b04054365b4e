"""SMT-LIB2 rendering and reading of logic expressions and solver models."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, Mapping, Union

from lark import Lark, Transformer
from lark.exceptions import LarkError

from .errors import RejectedInputError
from .logic import (
    FALSE,
    TRUE,
    Add,
    And,
    BoolConst,
    Cmp,
    Expr,
    FIte,
    Formula,
    Iff,
    Implies,
    IntConst,
    IntDiv,
    Ite,
    Neg,
    Not,
    Or,
    RealConst,
    Scale,
    Sort,
    Sub,
    Term,
    Value,
    Var,
)

SExpr = Union[str, List["SExpr"]]

_SEXPR_GRAMMAR = r"""
    start: _sexpr*
    _sexpr: group | ATOM
    group: "(" _sexpr* ")"
    ATOM: /\|[^|]*\|/ | /"[^"]*"/ | /[^\s()|;"]+/
    COMMENT: /;[^\n]*/
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""


class _ToLists(Transformer):
    def start(self, items):
        return [_plain(i) for i in items]

    def group(self, items):
        return [_plain(i) for i in items]


def _plain(item):
    return item if isinstance(item, list) else str(item)


_parser = Lark(_SEXPR_GRAMMAR, parser="lalr", transformer=_ToLists())

_SIMPLE_SYMBOL = re.compile(r"^[A-Za-z~!@$%^&*_+=<>.?/\-][A-Za-z0-9~!@$%^&*_+=<>.?/\-]*$")
_NUMERAL = re.compile(r"^[0-9]+$")
_DECIMAL = re.compile(r"^[0-9]+\.[0-9]+$")


def read_sexprs(text: str) -> List[SExpr]:
    try:
        return _parser.parse(text)
    except LarkError as exc:
        raise RejectedInputError(f"malformed SMT-LIB text: {exc}") from exc


def read_sexpr(text: str) -> SExpr:
    items = read_sexprs(text)
    if len(items) != 1:
        raise RejectedInputError(f"expected one s-expression, got {len(items)}")
    return items[0]


# --------------------------------------------------------------------------- printing


def symbol(name: str) -> str:
    if _SIMPLE_SYMBOL.match(name):
        return name
    if "|" in name or "\\" in name:
        raise RejectedInputError(f"symbol {name!r} cannot be quoted")
    return f"|{name}|"


def _unquote(atom: str) -> str:
    if atom.startswith("|") and atom.endswith("|"):
        return atom[1:-1]
    return atom


def _number(value: Fraction, sort: Sort) -> str:
    if value < 0:
        return f"(- {_number(-value, sort)})"
    if sort is Sort.INT:
        return str(value.numerator)
    if value.denominator == 1:
        return f"{value.numerator}.0"
    return f"(/ {value.numerator}.0 {value.denominator}.0)"


def print_value(value: Value, sort: Sort) -> str:
    if sort is Sort.BOOL:
        return "true" if value else "false"
    return _number(Fraction(value), sort)


def sort_name(sort: Sort) -> str:
    return sort.value


def to_smtlib(e: Expr) -> str:
    """Render ``e`` as one SMT-LIB2 term."""
    match e:
        case Var(name, _):
            return symbol(name)
        case BoolConst(value):
            return "true" if value else "false"
        case IntConst(value):
            return _number(Fraction(value), Sort.INT)
        case RealConst(value):
            return _number(value, Sort.REAL)
        case Neg(arg):
            return f"(- {to_smtlib(arg)})"
        case Add(args):
            if len(args) == 1:
                return to_smtlib(args[0])
            return "(+ " + " ".join(to_smtlib(a) for a in args) + ")"
        case Sub(lhs, rhs):
            return f"(- {to_smtlib(lhs)} {to_smtlib(rhs)})"
        case Scale(coef, arg):
            return f"(* {_number(coef, arg.sort)} {to_smtlib(arg)})"
        case IntDiv(arg, divisor):
            return f"(div {to_smtlib(arg)} {divisor})"
        case Ite(c, t, f) | FIte(c, t, f):
            return f"(ite {to_smtlib(c)} {to_smtlib(t)} {to_smtlib(f)})"
        case Cmp(op, lhs, rhs):
            head = "distinct" if op == "!=" else op
            return f"({head} {to_smtlib(lhs)} {to_smtlib(rhs)})"
        case Not(arg):
            return f"(not {to_smtlib(arg)})"
        case And(args):
            if not args:
                return "true"
            if len(args) == 1:
                return to_smtlib(args[0])
            return "(and " + " ".join(to_smtlib(a) for a in args) + ")"
        case Or(args):
            if not args:
                return "false"
            if len(args) == 1:
                return to_smtlib(args[0])
            return "(or " + " ".join(to_smtlib(a) for a in args) + ")"
        case Implies(lhs, rhs):
            return f"(=> {to_smtlib(lhs)} {to_smtlib(rhs)})"
        case Iff(lhs, rhs):
            return f"(= {to_smtlib(lhs)} {to_smtlib(rhs)})"
    raise RejectedInputError(f"cannot print {e!r}")


def declaration(var: Var) -> str:
    return f"(declare-fun {symbol(var.name)} () {sort_name(var.sort)})"


# --------------------------------------------------------------------------- reading


def parse_value(sexpr: SExpr, sort: Sort) -> Value:
    """Read a model value: numerals, decimals, ``(- v)``, ``(/ a b)``, booleans."""
    if isinstance(sexpr, str):
        if sort is Sort.BOOL:
            if sexpr in ("true", "false"):
                return sexpr == "true"
            raise RejectedInputError(f"bad boolean value {sexpr!r}")
        if _NUMERAL.match(sexpr) or _DECIMAL.match(sexpr):
            value = Fraction(sexpr)
        else:
            raise RejectedInputError(f"bad numeric value {sexpr!r}")
    elif len(sexpr) == 2 and sexpr[0] == "-":
        value = -Fraction(parse_value(sexpr[1], Sort.REAL))
    elif len(sexpr) == 3 and sexpr[0] == "/":
        value = Fraction(parse_value(sexpr[1], Sort.REAL)) / Fraction(parse_value(sexpr[2], Sort.REAL))
    elif len(sexpr) == 2 and sexpr[0] == "to_real":
        value = Fraction(parse_value(sexpr[1], Sort.REAL))
    else:
        raise RejectedInputError(f"bad model value {sexpr!r}")
    if sort is Sort.INT:
        if value.denominator != 1:
            raise RejectedInputError(f"non-integral value {value} for an Int")
        return int(value)
    if sort is Sort.BOOL:
        raise RejectedInputError(f"numeric value {value} for a Bool")
    return value


def parse_model(text: str, sorts: Mapping[str, Sort]) -> Dict[str, Value]:
    """Read a ``(get-model)`` answer; symbols absent from ``sorts`` are ignored."""
    sexpr = read_sexpr(text)
    if not isinstance(sexpr, list):
        raise RejectedInputError(f"bad model {text!r}")
    entries = sexpr[1:] if sexpr and sexpr[0] == "model" else sexpr
    model: Dict[str, Value] = {}
    for entry in entries:
        if not isinstance(entry, list) or len(entry) != 5 or entry[0] != "define-fun":
            continue
        _, name, params, _sort, body = entry
        name = _unquote(name)
        if params or name not in sorts:
            continue
        model[name] = parse_value(body, sorts[name])
    return model


class _Reader:
    def __init__(self, sorts: Mapping[str, Sort]):
        self.sorts = sorts

    def read(self, s: SExpr) -> Expr:
        if isinstance(s, str):
            return self.atom(s)
        if not s:
            raise RejectedInputError("empty application")
        head, args = s[0], s[1:]
        if not isinstance(head, str):
            raise RejectedInputError(f"unsupported application head {head!r}")
        if head == "let":
            raise RejectedInputError("let bindings are not supported")
        method = _APPLICATIONS.get(head)
        if method is None:
            raise RejectedInputError(f"unknown operator {head!r}")
        return method(self, [self.read(a) for a in args], s)

    def atom(self, s: str) -> Expr:
        if s == "true":
            return TRUE
        if s == "false":
            return FALSE
        if _NUMERAL.match(s):
            return IntConst(int(s))
        if _DECIMAL.match(s):
            return RealConst(Fraction(s))
        name = _unquote(s)
        if name not in self.sorts:
            raise RejectedInputError(f"undeclared symbol {name!r}")
        return Var(name, self.sorts[name])

    # arithmetic ---------------------------------------------------------

    def minus(self, args, s):
        args = _unify(args)
        if len(args) == 1:
            a = args[0]
            if isinstance(a, IntConst):
                return IntConst(-a.value)
            if isinstance(a, RealConst):
                return RealConst(-a.value)
            return Neg(a)
        if len(args) < 2:
            raise RejectedInputError(f"bad arity in {s!r}")
        out = Sub(args[0], args[1])
        for a in args[2:]:
            out = Sub(out, a)
        return out

    def plus(self, args, s):
        return Add(tuple(_unify(args)))

    def times(self, args, s):
        args = _unify(args)
        consts = [a for a in args if isinstance(a, (IntConst, RealConst))]
        others = [a for a in args if not isinstance(a, (IntConst, RealConst))]
        if len(others) > 1:
            raise RejectedInputError(f"nonlinear product {s!r}")
        coef = Fraction(1)
        for c in consts:
            coef *= Fraction(c.value)
        if not others:
            return IntConst(int(coef)) if args[0].sort is Sort.INT else RealConst(coef)
        return Scale(coef, others[0])

    def divide(self, args, s):
        args = _unify([_as_real(a) for a in args])
        if len(args) != 2 or not isinstance(args[1], RealConst) or args[1].value == 0:
            raise RejectedInputError(f"division by a non-constant in {s!r}")
        if isinstance(args[0], RealConst):
            return RealConst(args[0].value / args[1].value)
        return Scale(1 / args[1].value, args[0])

    def intdiv(self, args, s):
        if len(args) != 2 or not isinstance(args[1], IntConst):
            raise RejectedInputError(f"div by a non-constant in {s!r}")
        return IntDiv(args[0], args[1].value)

    def ite(self, args, s):
        if len(args) != 3:
            raise RejectedInputError(f"bad arity in {s!r}")
        if args[1].sort is Sort.BOOL:
            return FIte(*args)
        then, else_ = _unify(args[1:])
        return Ite(args[0], then, else_)

    # comparisons ----------------------------------------------------------

    def equal(self, args, s):
        if len(args) < 2:
            raise RejectedInputError(f"bad arity in {s!r}")
        if args[0].sort is Sort.BOOL:
            pairs = [Iff(a, b) for a, b in zip(args, args[1:])]
        else:
            args = _unify(args)
            pairs = [Cmp("=", a, b) for a, b in zip(args, args[1:])]
        return pairs[0] if len(pairs) == 1 else And(tuple(pairs))

    def distinct(self, args, s):
        if len(args) < 2:
            raise RejectedInputError(f"bad arity in {s!r}")
        pairs = []
        for i, a in enumerate(args):
            for b in args[i + 1 :]:
                if a.sort is Sort.BOOL:
                    pairs.append(Not(Iff(a, b)))
                else:
                    lhs, rhs = _unify([a, b])
                    pairs.append(Cmp("!=", lhs, rhs))
        return pairs[0] if len(pairs) == 1 else And(tuple(pairs))

    def relation(self, args, s):
        args = _unify(args)
        if len(args) < 2:
            raise RejectedInputError(f"bad arity in {s!r}")
        pairs = [Cmp(s[0], a, b) for a, b in zip(args, args[1:])]
        return pairs[0] if len(pairs) == 1 else And(tuple(pairs))

    # connectives ----------------------------------------------------------

    def not_(self, args, s):
        if len(args) != 1:
            raise RejectedInputError(f"bad arity in {s!r}")
        return Not(args[0])

    def and_(self, args, s):
        return And(tuple(args)) if args else TRUE

    def or_(self, args, s):
        return Or(tuple(args)) if args else FALSE

    def implies(self, args, s):
        if len(args) < 2:
            raise RejectedInputError(f"bad arity in {s!r}")
        out = args[-1]
        for a in reversed(args[:-1]):
            out = Implies(a, out)
        return out

    def to_real(self, args, s):
        return _as_real(args[0])


_APPLICATIONS = {
    "-": _Reader.minus,
    "+": _Reader.plus,
    "*": _Reader.times,
    "/": _Reader.divide,
    "div": _Reader.intdiv,
    "ite": _Reader.ite,
    "=": _Reader.equal,
    "distinct": _Reader.distinct,
    "<": _Reader.relation,
    "<=": _Reader.relation,
    ">": _Reader.relation,
    ">=": _Reader.relation,
    "not": _Reader.not_,
    "and": _Reader.and_,
    "or": _Reader.or_,
    "=>": _Reader.implies,
    "to_real": _Reader.to_real,
}


def _as_real(t: Expr) -> Expr:
    if isinstance(t, IntConst):
        return RealConst(Fraction(t.value))
    return t


def _unify(args: List[Expr]) -> List[Expr]:
    """Lift integer literals to reals when they meet a real operand."""
    if any(a.sort is Sort.REAL for a in args):
        return [_as_real(a) for a in args]
    return list(args)


def parse_expr(text: str, sorts: Mapping[str, Sort]) -> Expr:
    return _Reader(sorts).read(read_sexpr(text))


def parse_formula(text: str, sorts: Mapping[str, Sort]) -> Formula:
    e = parse_expr(text, sorts)
    if e.sort is not Sort.BOOL:
        raise RejectedInputError(f"expected a formula, got a {e.sort.value} term")
    return e  # type: ignore[return-value]


def parse_term(text: str, sorts: Mapping[str, Sort]) -> Term:
    e = parse_expr(text, sorts)
    if e.sort is Sort.BOOL:
        raise RejectedInputError("expected a numeric term, got a formula")
    return e  # type: ignore[return-value]
