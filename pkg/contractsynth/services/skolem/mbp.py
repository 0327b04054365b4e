"""Model-based projection of existentials out of a transition formula.

Given a model ``m`` of ``goal`` the projection is a conjunction ``proj`` over
the universals with ``m |= proj`` and ``proj => exists y . goal``. Alongside it
each eliminated existential keeps the atoms that bound it in the chosen
region; the refiner turns those into witness terms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ...core.errors import InternalError
from ...core.logic import (
    FLIPPED_OP,
    NEGATED_OP,
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
    Ite,
    Not,
    Or,
    Scale,
    Sort,
    Sub,
    Term,
    Value,
    Var,
    conj,
    const,
    contains_symbol,
    evaluate,
    normalize,
    rebuild,
    simplify,
    split_linear,
    substitute,
)
from .types import LocalRelation

logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------- literal selection


def select_literals(f: Formula, model: Mapping[str, Value]) -> List[Formula]:
    """Literals true in ``model`` whose conjunction implies ``f``.

    Connectives are resolved by the model; term-level if-then-else is replaced
    by the branch the model takes, its condition becoming extra literals.
    """
    out: List[Formula] = []
    _select(f, model, out)
    return out


def _push(out: List[Formula], lit: Formula) -> None:
    if lit != TRUE and lit not in out:
        out.append(lit)


def _select(f: Formula, model: Mapping[str, Value], out: List[Formula]) -> None:
    value = bool(evaluate(f, model))
    match f:
        case BoolConst():
            return
        case Var():
            _push(out, f if value else Not(f))
        case Cmp(op, lhs, rhs):
            lhs = _strip_ites(lhs, model, out)
            rhs = _strip_ites(rhs, model, out)
            _push(out, Cmp(op if value else NEGATED_OP[op], lhs, rhs))
        case Not(arg):
            _select(arg, model, out)
        case And(args):
            if value:
                for a in args:
                    _select(a, model, out)
            else:
                _select(next(a for a in args if not evaluate(a, model)), model, out)
        case Or(args):
            if value:
                _select(next(a for a in args if evaluate(a, model)), model, out)
            else:
                for a in args:
                    _select(a, model, out)
        case Implies(lhs, rhs):
            if value and not evaluate(lhs, model):
                _select(lhs, model, out)
            elif value:
                _select(rhs, model, out)
            else:
                _select(lhs, model, out)
                _select(rhs, model, out)
        case Iff(lhs, rhs):
            _select(lhs, model, out)
            _select(rhs, model, out)
        case FIte(cond, then, else_):
            _select(cond, model, out)
            _select(then if evaluate(cond, model) else else_, model, out)
        case _:
            raise InternalError(f"cannot select literals of {f!r}")


def _strip_ites(t: Expr, model: Mapping[str, Value], out: List[Formula]) -> Expr:
    if isinstance(t, Ite):
        _select(t.cond, model, out)
        return _strip_ites(t.then if evaluate(t.cond, model) else t.else_, model, out)
    return rebuild(t, lambda c: _strip_ites(c, model, out))


# --------------------------------------------------------------------------- bounds


@dataclass(frozen=True)
class _Bound:
    """``y op term`` with ``term`` free of ``y``."""

    op: str
    term: Term

    def atom(self, y: Var) -> Formula:
        return Cmp(self.op, y, self.term)


def _as_bound(lit: Formula, y: Var) -> Optional[_Bound]:
    if not isinstance(lit, Cmp):
        return None
    split = split_linear(Sub(lit.lhs, lit.rhs), y.name)
    if split is None:
        return None
    coef, rest = split
    if coef == 0 or (y.sort is Sort.INT and abs(coef) != 1):
        return None
    term = normalize(Scale(Fraction(-1) / coef, rest))
    return _Bound(lit.op if coef > 0 else FLIPPED_OP[lit.op], term)


# --------------------------------------------------------------------------- elimination


def mbp(
    model: Mapping[str, Value], existentials: Sequence[Var], goal: Formula
) -> Tuple[Formula, LocalRelation]:
    """Project ``existentials`` out of ``goal`` around ``model``.

    Existentials are eliminated last-declared first.
    """
    literals = select_literals(goal, model)
    order = tuple(reversed(tuple(existentials)))
    atoms: Dict[str, Tuple[Formula, ...]] = {}
    for y in order:
        literals, atoms[y.name] = _eliminate(y, literals, model)
    projection = simplify(conj(*literals))
    logger.debug("projected %d existentials: %d literals remain", len(order), len(literals))
    return projection, LocalRelation(order, atoms)  # type: ignore[arg-type]


def _eliminate(
    y: Var, literals: List[Formula], model: Mapping[str, Value]
) -> Tuple[List[Formula], Tuple[Formula, ...]]:
    involved = [lit for lit in literals if contains_symbol(lit, y.name)]
    rest = [lit for lit in literals if not contains_symbol(lit, y.name)]
    if not involved:
        return rest, ()
    if y.sort is Sort.BOOL:
        value = bool(model[y.name])
        return _pin(y, BoolConst(value), involved, rest), (y if value else Not(y),)

    bounds = [_as_bound(lit, y) for lit in involved]
    if any(b is None for b in bounds):
        term = const(model[y.name], y.sort)
        return _pin(y, term, involved, rest), (Cmp("=", y, term),)  # type: ignore[arg-type]
    usable: List[_Bound] = bounds  # type: ignore[assignment]
    equal = [b.term for b in usable if b.op == "="]
    if equal:
        return _pin(y, equal[0], involved, rest), (Cmp("=", y, equal[0]),)
    if y.sort is Sort.INT:
        return _eliminate_int(y, usable, involved, rest, model)
    return _eliminate_real(y, usable, involved, rest, model)


def _pin(y: Var, term: Expr, involved: Sequence[Formula], rest: List[Formula]) -> List[Formula]:
    out = list(rest)
    for lit in involved:
        reduced = simplify(substitute(lit, {y.name: term}))
        if reduced == BoolConst(False):
            raise InternalError(f"substituting the model value of {y.name} falsified {lit!r}")
        _push(out, reduced)  # type: ignore[arg-type]
    return out


def _eliminate_real(
    y: Var,
    bounds: List[_Bound],
    involved: List[Formula],
    rest: List[Formula],
    model: Mapping[str, Value],
) -> Tuple[List[Formula], Tuple[Formula, ...]]:
    lowers = [(b.term, b.op == ">") for b in bounds if b.op in (">", ">=")]
    uppers = [(b.term, b.op == "<") for b in bounds if b.op in ("<", "<=")]
    holes = [b.term for b in bounds if b.op == "!="]
    atoms = tuple(b.atom(y) for b in bounds)
    out = list(rest)
    if not (lowers and uppers):
        return out, atoms

    def val(t: Term):
        return evaluate(t, model)

    # Ties prefer the strict bound so every other lower bound stays at or below it.
    best = max(range(len(lowers)), key=lambda i: (val(lowers[i][0]), lowers[i][1]))
    l_star, l_strict = lowers[best]
    open_interval = False
    if holes and not l_strict:
        if all(val(u) > val(l_star) for u, _ in uppers):
            open_interval = True
        else:
            return _pin(y, l_star, involved, rest), (Cmp("=", y, l_star),)
    for i, (lower, strict) in enumerate(lowers):
        if i != best:
            op = "<" if strict and not l_strict else "<="
            _push(out, simplify(Cmp(op, lower, l_star)))  # type: ignore[arg-type]
    for upper, strict in uppers:
        op = "<" if strict or l_strict or open_interval else "<="
        _push(out, simplify(Cmp(op, l_star, upper)))  # type: ignore[arg-type]
    return out, atoms


def _eliminate_int(
    y: Var,
    bounds: List[_Bound],
    involved: List[Formula],
    rest: List[Formula],
    model: Mapping[str, Value],
) -> Tuple[List[Formula], Tuple[Formula, ...]]:
    step = IntConst(1)
    lowers = [
        normalize(Add((b.term, step))) if b.op == ">" else b.term for b in bounds if b.op in (">", ">=")
    ]
    uppers = [
        normalize(Sub(b.term, step)) if b.op == "<" else b.term for b in bounds if b.op in ("<", "<=")
    ]
    holes = [b.term for b in bounds if b.op == "!="]

    def val(t: Term) -> int:
        return evaluate(t, model)  # type: ignore[return-value]

    if holes:
        # Pin y to its model offset from the tightest bound (or the first hole).
        if lowers:
            anchor = max(lowers, key=val)
        elif uppers:
            anchor = min(uppers, key=val)
        else:
            anchor = holes[0]
        offset = model[y.name] - val(anchor)  # type: ignore[operator]
        term = normalize(Add((anchor, IntConst(offset))))
        return _pin(y, term, involved, rest), (Cmp("=", y, term),)

    atoms = tuple(Cmp(">=", y, t) for t in lowers) + tuple(Cmp("<=", y, t) for t in uppers)
    out = list(rest)
    if lowers and uppers:
        l_star = max(lowers, key=val)
        for lower in lowers:
            if lower is not l_star:
                _push(out, simplify(Cmp("<=", lower, l_star)))  # type: ignore[arg-type]
        for upper in uppers:
            _push(out, simplify(Cmp("<=", l_star, upper)))  # type: ignore[arg-type]
    return out, atoms  # type: ignore[return-value]
