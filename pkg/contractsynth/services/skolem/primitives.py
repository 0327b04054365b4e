"""Term builders the refiner assembles Skolem functions from.

Every builder is sort-aware: integer midpoints floor, integer strict bounds
step by one. Results are not simplified; callers run :func:`simplify`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ...core.errors import InternalError
from ...core.logic import Add, Cmp, IntConst, IntDiv, Ite, RealConst, Scale, Sort, Sub, Term


def one(sort: Sort) -> Term:
    return IntConst(1) if sort is Sort.INT else RealConst(Fraction(1))


def mid(lower: Term, upper: Term) -> Term:
    if lower.sort is Sort.INT:
        return IntDiv(Add((lower, upper)), 2)
    return Scale(Fraction(1, 2), Add((lower, upper)))


def maximum(a: Term, b: Term) -> Term:
    return Ite(Cmp("<", a, b), b, a)


def minimum(a: Term, b: Term) -> Term:
    return Ite(Cmp("<", a, b), a, b)


def above(lower: Term, strict: bool) -> Term:
    """Smallest convenient value satisfying ``y > lower`` (or ``y >= lower``)."""
    return Add((lower, one(lower.sort))) if strict else lower


def below(upper: Term, strict: bool) -> Term:
    return Sub(upper, one(upper.sort)) if strict else upper


def merge_max(terms: Sequence[Term]) -> Term:
    if not terms:
        raise InternalError("maximum of no bounds")
    result = terms[-1]
    for term in reversed(terms[:-1]):
        result = maximum(term, result)
    return result


def merge_min(terms: Sequence[Term]) -> Term:
    if not terms:
        raise InternalError("minimum of no bounds")
    result = terms[-1]
    for term in reversed(terms[:-1]):
        result = minimum(term, result)
    return result


def mid_avoiding(lower: Term, upper: Term, hole: Term) -> Term:
    """Midpoint of ``(lower, upper)`` that differs from ``hole``.

    Over the reals the midpoint is retried in the lower half. Over the
    integers the neighbours of the hole are tried instead.
    """
    centre = mid(lower, upper)
    if lower.sort is Sort.REAL:
        return Ite(Cmp("=", centre, hole), mid(lower, centre), centre)
    step = one(Sort.INT)
    up = Add((hole, step))
    return Ite(
        Cmp("!=", centre, hole),
        centre,
        Ite(Cmp("<=", up, upper), up, Sub(hole, step)),
    )
