"""Quantifier-free terms and formulas over linear integer/real arithmetic and booleans.

All values are exact: integers are Python ints, rationals are ``fractions.Fraction``.
Every node is an immutable dataclass, so expressions can be shared freely and used
as dictionary keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union

from .errors import RejectedInputError


class Sort(str, Enum):
    INT = "Int"
    REAL = "Real"
    BOOL = "Bool"

    @property
    def numeric(self) -> bool:
        return self is not Sort.BOOL


Value = Union[bool, int, Fraction]


# --------------------------------------------------------------------------- nodes


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort


@dataclass(frozen=True)
class IntConst:
    value: int

    @property
    def sort(self) -> Sort:
        return Sort.INT


@dataclass(frozen=True)
class RealConst:
    value: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    @property
    def sort(self) -> Sort:
        return Sort.REAL


@dataclass(frozen=True)
class BoolConst:
    value: bool

    @property
    def sort(self) -> Sort:
        return Sort.BOOL


def _numeric_sort(args: Iterable["Expr"], what: str) -> Sort:
    sorts = {a.sort for a in args}
    if len(sorts) != 1:
        raise RejectedInputError(f"{what}: operands must share one numeric sort, got {sorts}")
    (sort,) = sorts
    if not sort.numeric:
        raise RejectedInputError(f"{what}: operands must be numeric, got {sort.value}")
    return sort


def _require_bool(args: Iterable["Expr"], what: str) -> None:
    for a in args:
        if a.sort is not Sort.BOOL:
            raise RejectedInputError(f"{what}: operand of sort {a.sort.value} is not boolean")


@dataclass(frozen=True)
class Neg:
    arg: "Term"

    def __post_init__(self) -> None:
        _numeric_sort([self.arg], "negation")

    @property
    def sort(self) -> Sort:
        return self.arg.sort


@dataclass(frozen=True)
class Add:
    args: Tuple["Term", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise RejectedInputError("sum needs at least one operand")
        _numeric_sort(self.args, "sum")

    @property
    def sort(self) -> Sort:
        return self.args[0].sort


@dataclass(frozen=True)
class Sub:
    lhs: "Term"
    rhs: "Term"

    def __post_init__(self) -> None:
        _numeric_sort([self.lhs, self.rhs], "difference")

    @property
    def sort(self) -> Sort:
        return self.lhs.sort


@dataclass(frozen=True)
class Scale:
    """Constant multiple ``coef * arg``; integer terms need an integral coefficient."""

    coef: Fraction
    arg: "Term"

    def __post_init__(self) -> None:
        if not isinstance(self.coef, Fraction):
            object.__setattr__(self, "coef", Fraction(self.coef))
        sort = _numeric_sort([self.arg], "scalar multiple")
        if sort is Sort.INT and self.coef.denominator != 1:
            raise RejectedInputError(f"integer term scaled by non-integral {self.coef}")

    @property
    def sort(self) -> Sort:
        return self.arg.sort


@dataclass(frozen=True)
class IntDiv:
    """Floor division of an integer term by a positive integer constant."""

    arg: "Term"
    divisor: int

    def __post_init__(self) -> None:
        if _numeric_sort([self.arg], "integer division") is not Sort.INT:
            raise RejectedInputError("integer division of a non-integer term")
        if self.divisor <= 0:
            raise RejectedInputError("integer division needs a positive divisor")

    @property
    def sort(self) -> Sort:
        return Sort.INT


@dataclass(frozen=True)
class Ite:
    cond: "Formula"
    then: "Term"
    else_: "Term"

    def __post_init__(self) -> None:
        _require_bool([self.cond], "ite condition")
        _numeric_sort([self.then, self.else_], "ite branches")

    @property
    def sort(self) -> Sort:
        return self.then.sort


CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")
NEGATED_OP = {"=": "!=", "!=": "=", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}
FLIPPED_OP = {"=": "=", "!=": "!=", "<": ">", "<=": ">=", ">": "<", ">=": "<="}


@dataclass(frozen=True)
class Cmp:
    op: str
    lhs: "Term"
    rhs: "Term"

    def __post_init__(self) -> None:
        if self.op not in CMP_OPS:
            raise RejectedInputError(f"unknown comparison {self.op!r}")
        _numeric_sort([self.lhs, self.rhs], f"comparison {self.op}")

    @property
    def sort(self) -> Sort:
        return Sort.BOOL


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __post_init__(self) -> None:
        _require_bool([self.arg], "not")

    @property
    def sort(self) -> Sort:
        return Sort.BOOL


@dataclass(frozen=True)
class And:
    args: Tuple["Formula", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        _require_bool(self.args, "and")

    @property
    def sort(self) -> Sort:
        return Sort.BOOL


@dataclass(frozen=True)
class Or:
    args: Tuple["Formula", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        _require_bool(self.args, "or")

    @property
    def sort(self) -> Sort:
        return Sort.BOOL


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"

    def __post_init__(self) -> None:
        _require_bool([self.lhs, self.rhs], "implies")

    @property
    def sort(self) -> Sort:
        return Sort.BOOL


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"

    def __post_init__(self) -> None:
        _require_bool([self.lhs, self.rhs], "iff")

    @property
    def sort(self) -> Sort:
        return Sort.BOOL


@dataclass(frozen=True)
class FIte:
    cond: "Formula"
    then: "Formula"
    else_: "Formula"

    def __post_init__(self) -> None:
        _require_bool([self.cond, self.then, self.else_], "formula ite")

    @property
    def sort(self) -> Sort:
        return Sort.BOOL


Term = Union[Var, IntConst, RealConst, Neg, Add, Sub, Scale, IntDiv, Ite]
Formula = Union[Var, BoolConst, Cmp, Not, And, Or, Implies, Iff, FIte]
Expr = Union[Term, Formula]
Model = Dict[str, Value]

TRUE = BoolConst(True)
FALSE = BoolConst(False)


# --------------------------------------------------------------------------- builders


def const(value: Value, sort: Sort) -> Expr:
    if sort is Sort.BOOL:
        return BoolConst(bool(value))
    if sort is Sort.INT:
        frac = Fraction(value)
        if frac.denominator != 1:
            raise RejectedInputError(f"non-integral value {value} for an Int")
        return IntConst(int(frac))
    return RealConst(Fraction(value))


def zero(sort: Sort) -> Term:
    return IntConst(0) if sort is Sort.INT else RealConst(Fraction(0))


def is_const(e: Expr) -> bool:
    return isinstance(e, (IntConst, RealConst, BoolConst))


def conj(*args: Formula) -> Formula:
    flat = tuple(args)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(flat)


def disj(*args: Formula) -> Formula:
    flat = tuple(args)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(flat)


def equals(lhs: Expr, rhs: Expr) -> Formula:
    """Sort-directed equality: ``Iff`` for booleans, ``Cmp('=')`` otherwise."""
    if lhs.sort is Sort.BOOL or rhs.sort is Sort.BOOL:
        return Iff(lhs, rhs)  # type: ignore[arg-type]
    return Cmp("=", lhs, rhs)  # type: ignore[arg-type]


def negate(f: Formula) -> Formula:
    """Negation that pushes into comparisons and constants."""
    if isinstance(f, BoolConst):
        return BoolConst(not f.value)
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, Cmp):
        return Cmp(NEGATED_OP[f.op], f.lhs, f.rhs)
    return Not(f)


# --------------------------------------------------------------------------- traversal


def children(e: Expr) -> Tuple[Expr, ...]:
    match e:
        case Neg(arg) | Scale(_, arg) | IntDiv(arg, _) | Not(arg):
            return (arg,)
        case Add(args) | And(args) | Or(args):
            return tuple(args)
        case Sub(lhs, rhs) | Cmp(_, lhs, rhs) | Implies(lhs, rhs) | Iff(lhs, rhs):
            return (lhs, rhs)
        case Ite(c, t, f) | FIte(c, t, f):
            return (c, t, f)
    return ()


def rebuild(e: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    """Return ``e`` with ``fn`` applied to each direct child."""
    match e:
        case Neg(arg):
            return Neg(fn(arg))
        case Add(args):
            return Add(tuple(fn(a) for a in args))
        case Sub(lhs, rhs):
            return Sub(fn(lhs), fn(rhs))
        case Scale(coef, arg):
            return Scale(coef, fn(arg))
        case IntDiv(arg, divisor):
            return IntDiv(fn(arg), divisor)
        case Ite(c, t, f):
            return Ite(fn(c), fn(t), fn(f))
        case Cmp(op, lhs, rhs):
            return Cmp(op, fn(lhs), fn(rhs))
        case Not(arg):
            return Not(fn(arg))
        case And(args):
            return And(tuple(fn(a) for a in args))
        case Or(args):
            return Or(tuple(fn(a) for a in args))
        case Implies(lhs, rhs):
            return Implies(fn(lhs), fn(rhs))
        case Iff(lhs, rhs):
            return Iff(fn(lhs), fn(rhs))
        case FIte(c, t, f):
            return FIte(fn(c), fn(t), fn(f))
    return e


def free_symbols(e: Expr) -> FrozenSet[Var]:
    found: set = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            found.add(node)
        else:
            stack.extend(children(node))
    return frozenset(found)


def free_names(e: Expr) -> FrozenSet[str]:
    return frozenset(v.name for v in free_symbols(e))


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace every occurrence of each mapped symbol; there are no binders to capture."""
    if not mapping:
        return e

    def go(node: Expr) -> Expr:
        if isinstance(node, Var):
            repl = mapping.get(node.name)
            if repl is None:
                return node
            if repl.sort is not node.sort:
                raise RejectedInputError(
                    f"cannot substitute {repl.sort.value} term for {node.name}:{node.sort.value}"
                )
            return repl
        return rebuild(node, go)

    return go(e)


def rename(e: Expr, names: Mapping[str, str]) -> Expr:
    """Rename free symbols, keeping their sorts."""
    return substitute(e, {v.name: Var(names[v.name], v.sort) for v in free_symbols(e) if v.name in names})


# --------------------------------------------------------------------------- evaluation


def _as_number(value: Value, sort: Sort, name: str) -> Union[int, Fraction]:
    if isinstance(value, bool):
        raise RejectedInputError(f"symbol {name} bound to a boolean, expected {sort.value}")
    if sort is Sort.REAL:
        return Fraction(value)
    return value


def evaluate(e: Expr, m: Mapping[str, Value]) -> Value:
    """Exact evaluation of a term or formula under a model total over its free symbols."""
    match e:
        case Var(name, sort):
            if name not in m:
                raise RejectedInputError(f"unbound symbol {name}")
            value = m[name]
            if sort is Sort.BOOL:
                if not isinstance(value, bool):
                    raise RejectedInputError(f"symbol {name} must be boolean, got {value!r}")
                return value
            return _as_number(value, sort, name)
        case IntConst(value) | BoolConst(value):
            return value
        case RealConst(value):
            return value
        case Neg(arg):
            return -evaluate(arg, m)
        case Add(args):
            return sum((evaluate(a, m) for a in args), zero_value(e.sort))
        case Sub(lhs, rhs):
            return evaluate(lhs, m) - evaluate(rhs, m)
        case Scale(coef, arg):
            product = coef * evaluate(arg, m)
            return int(product) if e.sort is Sort.INT else product
        case IntDiv(arg, divisor):
            return evaluate(arg, m) // divisor
        case Ite(c, t, f) | FIte(c, t, f):
            return evaluate(t, m) if evaluate(c, m) else evaluate(f, m)
        case Cmp(op, lhs, rhs):
            return compare(op, evaluate(lhs, m), evaluate(rhs, m))
        case Not(arg):
            return not evaluate(arg, m)
        case And(args):
            return all(evaluate(a, m) for a in args)
        case Or(args):
            return any(evaluate(a, m) for a in args)
        case Implies(lhs, rhs):
            return (not evaluate(lhs, m)) or bool(evaluate(rhs, m))
        case Iff(lhs, rhs):
            return bool(evaluate(lhs, m)) == bool(evaluate(rhs, m))
    raise RejectedInputError(f"cannot evaluate {e!r}")


def zero_value(sort: Sort) -> Value:
    if sort is Sort.BOOL:
        return False
    return 0 if sort is Sort.INT else Fraction(0)


def compare(op: str, a, b) -> bool:
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


# --------------------------------------------------------------------------- linear forms

LinearForm = Tuple[Dict[str, Fraction], Fraction]


def linear_form(t: Term) -> Optional[LinearForm]:
    """Coefficients and constant of an ite-free linear term, or ``None``."""
    match t:
        case Var(name, _):
            return {name: Fraction(1)}, Fraction(0)
        case IntConst(value) | RealConst(value):
            return {}, Fraction(value)
        case Neg(arg):
            inner = linear_form(arg)
            if inner is None:
                return None
            return {k: -c for k, c in inner[0].items()}, -inner[1]
        case Add(args):
            coeffs: Dict[str, Fraction] = {}
            constant = Fraction(0)
            for a in args:
                part = linear_form(a)
                if part is None:
                    return None
                for k, c in part[0].items():
                    coeffs[k] = coeffs.get(k, Fraction(0)) + c
                constant += part[1]
            return coeffs, constant
        case Sub(lhs, rhs):
            return linear_form(Add((lhs, Neg(rhs))))
        case Scale(coef, arg):
            inner = linear_form(arg)
            if inner is None:
                return None
            return {k: coef * c for k, c in inner[0].items()}, coef * inner[1]
    return None


def contains_symbol(e: Expr, name: str) -> bool:
    return name in free_names(e)


def split_linear(t: Term, name: str) -> Optional[Tuple[Fraction, Term]]:
    """Write ``t`` as ``coef * name + rest`` with ``rest`` free of ``name``.

    Subterms that do not mention ``name`` are kept opaque, so ites and integer
    divisions over other symbols are allowed. Returns ``None`` when ``name``
    occurs under an ite or an integer division.
    """
    sort = t.sort
    if not contains_symbol(t, name):
        return Fraction(0), t
    match t:
        case Var(n, _) if n == name:
            return Fraction(1), zero(sort)
        case Neg(arg):
            inner = split_linear(arg, name)
            if inner is None:
                return None
            return -inner[0], Neg(inner[1])
        case Add(args):
            coef = Fraction(0)
            rests = []
            for a in args:
                part = split_linear(a, name)
                if part is None:
                    return None
                coef += part[0]
                rests.append(part[1])
            return coef, Add(tuple(rests))
        case Sub(lhs, rhs):
            left = split_linear(lhs, name)
            right = split_linear(rhs, name)
            if left is None or right is None:
                return None
            return left[0] - right[0], Sub(left[1], right[1])
        case Scale(c, arg):
            inner = split_linear(arg, name)
            if inner is None:
                return None
            return c * inner[0], Scale(c, inner[1])
    return None


def normalize(t: Term) -> Term:
    """Canonical ``c1*v1 + ... + k`` rendering of a linear term; other terms are simplified."""
    form = linear_form(t)
    if form is None:
        return simplify(t)  # type: ignore[return-value]
    coeffs, constant = form
    sort = t.sort
    symbols = {v.name: v for v in free_symbols(t)}
    parts: list = []
    for name, coef in coeffs.items():
        if coef == 0:
            continue
        var = symbols[name]
        if coef == 1:
            parts.append(var)
        elif coef == -1:
            parts.append(Neg(var))
        else:
            parts.append(Scale(coef, var))
    if constant != 0 or not parts:
        parts.append(_fold_number(constant, sort))
    return parts[0] if len(parts) == 1 else Add(tuple(parts))


# --------------------------------------------------------------------------- simplification


def _fold_number(value: Fraction, sort: Sort) -> Term:
    if sort is Sort.INT:
        return IntConst(int(value))
    return RealConst(value)


def simplify(e: Expr) -> Expr:
    """Return an equivalent expression with constants folded.

    Guaranteed rewrites: comparisons between constants (and between linear
    terms whose difference is constant) fold, ites with constant conditions
    collapse, boolean constants are absorbed by and/or, double negation goes.
    """
    node = rebuild(e, simplify)
    match node:
        case Neg(arg):
            if isinstance(arg, (IntConst, RealConst)):
                return _fold_number(-Fraction(arg.value), node.sort)
            if isinstance(arg, Neg):
                return arg.arg
            return node
        case Add(args):
            flat = []
            for a in args:
                flat.extend(a.args if isinstance(a, Add) else (a,))
            numbers = [Fraction(a.value) for a in flat if isinstance(a, (IntConst, RealConst))]
            total = sum(numbers, Fraction(0))
            rest = [a for a in flat if not isinstance(a, (IntConst, RealConst))]
            if total != 0 or not rest:
                rest.append(_fold_number(total, node.sort))
            return rest[0] if len(rest) == 1 else Add(tuple(rest))
        case Sub(lhs, rhs):
            if isinstance(lhs, (IntConst, RealConst)) and isinstance(rhs, (IntConst, RealConst)):
                return _fold_number(Fraction(lhs.value) - Fraction(rhs.value), node.sort)
            if isinstance(rhs, (IntConst, RealConst)) and rhs.value == 0:
                return lhs
            if lhs == rhs:
                return zero(node.sort)
            return node
        case Scale(coef, arg):
            if coef == 1:
                return arg
            if coef == 0:
                return zero(node.sort)
            if isinstance(arg, (IntConst, RealConst)):
                return _fold_number(coef * Fraction(arg.value), node.sort)
            if isinstance(arg, Scale):
                return simplify(Scale(coef * arg.coef, arg.arg))
            return node
        case IntDiv(arg, divisor):
            if isinstance(arg, IntConst):
                return IntConst(arg.value // divisor)
            if divisor == 1:
                return arg
            return node
        case Ite(c, t, f) | FIte(c, t, f):
            if isinstance(c, BoolConst):
                return t if c.value else f
            if t == f:
                return t
            if isinstance(node, FIte) and isinstance(t, BoolConst) and isinstance(f, BoolConst):
                return c if t.value else simplify(Not(c))
            return node
        case Cmp(op, lhs, rhs):
            return _simplify_cmp(node)
        case Not(arg):
            if isinstance(arg, BoolConst):
                return BoolConst(not arg.value)
            if isinstance(arg, Not):
                return arg.arg
            return node
        case And(args):
            out = []
            for a in args:
                for b in a.args if isinstance(a, And) else (a,):
                    if b == FALSE:
                        return FALSE
                    if b != TRUE and b not in out:
                        out.append(b)
            return conj(*out)
        case Or(args):
            out = []
            for a in args:
                for b in a.args if isinstance(a, Or) else (a,):
                    if b == TRUE:
                        return TRUE
                    if b != FALSE and b not in out:
                        out.append(b)
            return disj(*out)
        case Implies(lhs, rhs):
            if lhs == FALSE or rhs == TRUE or lhs == rhs:
                return TRUE
            if lhs == TRUE:
                return rhs
            if rhs == FALSE:
                return simplify(Not(lhs))
            return node
        case Iff(lhs, rhs):
            if lhs == rhs:
                return TRUE
            for a, b in ((lhs, rhs), (rhs, lhs)):
                if isinstance(a, BoolConst):
                    return b if a.value else simplify(Not(b))
            return node
    return node


def _simplify_cmp(node: Cmp) -> Formula:
    lhs, rhs = node.lhs, node.rhs
    if is_const(lhs) and is_const(rhs):
        low, high = Fraction(lhs.value), Fraction(rhs.value)  # type: ignore[union-attr]
        return BoolConst(compare(node.op, low, high))
    if lhs == rhs:
        return BoolConst(node.op in ("=", "<=", ">="))
    left, right = linear_form(lhs), linear_form(rhs)
    if left is not None and right is not None:
        names = set(left[0]) | set(right[0])
        if all(left[0].get(n, 0) == right[0].get(n, 0) for n in names):
            return BoolConst(compare(node.op, left[1], right[1]))
    return node


def conjuncts(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, And):
        out: list = []
        for a in f.args:
            out.extend(conjuncts(a))
        return tuple(out)
    if f == TRUE:
        return ()
    return (f,)
