"""Turn the per-existential atoms of one projected case into witness terms."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from ...core.errors import InternalError
from ...core.logic import (
    FALSE,
    FLIPPED_OP,
    TRUE,
    Add,
    Cmp,
    Expr,
    Formula,
    Iff,
    IntConst,
    Ite,
    Not,
    RealConst,
    Scale,
    Sort,
    Sub,
    Term,
    Var,
    conj,
    conjuncts,
    free_symbols,
    is_const,
    negate,
    normalize,
    simplify,
    split_linear,
    substitute,
    zero,
)
from .primitives import above, below, merge_max, merge_min, mid, mid_avoiding, one
from .types import LocalRelation

logger = logging.getLogger(__name__)


@dataclass
class BoundClasses:
    """Atoms on one existential ``y`` sorted by shape (``y op t``)."""

    strict_lower: List[Term] = field(default_factory=list)
    lower: List[Term] = field(default_factory=list)
    strict_upper: List[Term] = field(default_factory=list)
    upper: List[Term] = field(default_factory=list)
    equal: List[Term] = field(default_factory=list)
    distinct: List[Term] = field(default_factory=list)

    def add(self, op: str, term: Term) -> None:
        target = {
            ">": self.strict_lower,
            ">=": self.lower,
            "<": self.strict_upper,
            "<=": self.upper,
            "=": self.equal,
            "!=": self.distinct,
        }[op]
        if term not in target:
            target.append(term)


def classify(y: Var, atoms: Sequence[Formula]) -> BoundClasses:
    classes = BoundClasses()
    for atom in atoms:
        for lit in conjuncts(atom):
            if isinstance(lit, Not):
                lit = negate(lit.arg)
            if lit == TRUE:
                continue
            if lit == FALSE:
                raise InternalError(f"atom on {y.name} is unsatisfiable")
            if not isinstance(lit, Cmp):
                raise InternalError(f"atom {lit!r} on {y.name} is not a comparison")
            split = split_linear(Sub(lit.lhs, lit.rhs), y.name)
            if split is None:
                raise InternalError(f"atom {lit!r} is not linear in {y.name}")
            coef, rest = split
            if coef == 0:
                continue
            term = normalize(Scale(Fraction(-1) / coef, rest))
            classes.add(lit.op if coef > 0 else FLIPPED_OP[lit.op], term)
    return classes


def extract_skolem_function(y: Var, atoms: Sequence[Formula]) -> Expr:
    """A term over the remaining symbols that satisfies every atom whenever they are satisfiable."""
    if y.sort is Sort.BOOL:
        return _boolean_witness(y, atoms)
    classes = classify(y, atoms)
    if classes.equal:
        return classes.equal[0]
    if y.sort is Sort.INT:
        return simplify(_integer_witness(classes))
    return simplify(_real_witness(classes))


def _boolean_witness(y: Var, atoms: Sequence[Formula]) -> Formula:
    for atom in atoms:
        for lit in conjuncts(simplify(atom)):  # type: ignore[arg-type]
            if lit == y:
                return TRUE
            if lit == Not(y):
                return FALSE
            if isinstance(lit, Iff):
                if lit.lhs == y and y not in free_symbols(lit.rhs):
                    return lit.rhs
                if lit.rhs == y and y not in free_symbols(lit.lhs):
                    return lit.lhs
    return FALSE


def _check_constant_bounds(
    lowers: Sequence[Tuple[Term, bool]], uppers: Sequence[Tuple[Term, bool]]
) -> None:
    """Raise when two constant bounds leave no room; pairs are (bound, strict)."""
    consts = [(simplify(t), s) for t, s in lowers]
    for hi, hi_strict in uppers:
        hi = simplify(hi)  # type: ignore[assignment]
        if not is_const(hi):
            continue
        high = Fraction(hi.value)  # type: ignore[union-attr]
        for lo, lo_strict in consts:
            if not is_const(lo):
                continue
            low = Fraction(lo.value)  # type: ignore[union-attr]
            if low > high or ((lo_strict or hi_strict) and low == high):
                raise InternalError(f"contradictory constant bounds {low} and {high}")


def _real_witness(classes: BoundClasses) -> Term:
    lowers = classes.strict_lower + classes.lower
    uppers = classes.strict_upper + classes.upper
    lo = merge_max(lowers) if lowers else None
    hi = merge_min(uppers) if uppers else None
    lo_strict = bool(classes.strict_lower)
    hi_strict = bool(classes.strict_upper)
    _check_constant_bounds(
        [(t, True) for t in classes.strict_lower] + [(t, False) for t in classes.lower],
        [(t, True) for t in classes.strict_upper] + [(t, False) for t in classes.upper],
    )
    holes = classes.distinct
    if not holes:
        if lo is not None and hi is not None:
            return mid(lo, hi)
        if lo is not None:
            return above(lo, lo_strict)
        if hi is not None:
            return below(hi, hi_strict)
        return zero(Sort.REAL)
    if lo is None and hi is None:
        return _first_admissible(_past_holes(holes), holes, [])
    if hi is None:
        hi = Add((lo, one(Sort.REAL)))  # type: ignore[arg-type]
    if lo is None:
        lo = Sub(hi, one(Sort.REAL))
    if len(holes) == 1:
        return mid_avoiding(lo, hi, holes[0])
    # Halving towards lo yields len(holes) + 1 distinct points inside the interval.
    candidates = [mid(lo, hi)]
    for _ in holes:
        candidates.append(mid(lo, candidates[-1]))
    return _first_admissible(candidates, holes, [])


def _integer_witness(classes: BoundClasses) -> Term:
    step = IntConst(1)
    lowers = [Add((t, step)) for t in classes.strict_lower] + classes.lower
    uppers = [Sub(t, step) for t in classes.strict_upper] + classes.upper
    lo = merge_max(lowers) if lowers else None
    hi = merge_min(uppers) if uppers else None
    _check_constant_bounds([(t, False) for t in lowers], [(t, False) for t in uppers])
    holes = classes.distinct
    if not holes:
        if lo is not None and hi is not None:
            return mid(lo, hi)
        if lo is not None:
            return lo
        if hi is not None:
            return hi
        return zero(Sort.INT)
    if lo is None and hi is None:
        return _first_admissible(_past_holes(holes), holes, [])
    if lo is not None and hi is not None and len(holes) == 1:
        return mid_avoiding(lo, hi, holes[0])
    candidates: List[Term] = []
    if lo is not None and hi is not None:
        candidates.append(mid(lo, hi))
    if lo is not None:
        candidates.append(lo)
    if hi is not None:
        candidates.append(hi)
    for h in holes:
        candidates.extend((Add((h, step)), Sub(h, step)))
    range_checks: List[Tuple[str, Term]] = []
    if lo is not None:
        range_checks.append((">=", lo))
    if hi is not None:
        range_checks.append(("<=", hi))
    return _first_admissible(candidates, holes, range_checks)


def _past_holes(holes: Sequence[Term]) -> List[Term]:
    sort = holes[0].sort
    return [Add((holes[0], _number(k, sort))) for k in range(1, len(holes) + 2)]


def _number(k: int, sort: Sort) -> Term:
    return IntConst(k) if sort is Sort.INT else RealConst(Fraction(k))


def _first_admissible(
    candidates: Sequence[Term], holes: Sequence[Term], range_checks: Sequence[Tuple[str, Term]]
) -> Term:
    """Nested if-then-else picking the first candidate that avoids every hole."""
    result = candidates[-1]
    for candidate in reversed(candidates[:-1]):
        ok = conj(
            *(Cmp("!=", candidate, h) for h in holes),
            *(Cmp(op, candidate, bound) for op, bound in range_checks),
        )
        result = Ite(ok, candidate, result)
    return result


def refine(relation: LocalRelation) -> Dict[str, Expr]:
    """Witness terms for every existential of one case, in elimination order reversed.

    Later-eliminated existentials are solved first and substituted into the
    atoms of earlier ones, so every result mentions universals only.
    """
    functions: Dict[str, Expr] = {}
    for y in reversed(relation.order):
        atoms = [simplify(substitute(a, functions)) for a in relation.atoms.get(y.name, ())]
        functions[y.name] = extract_skolem_function(y, atoms)  # type: ignore[arg-type]
        logger.debug("refined %s := %r", y.name, functions[y.name])
    return functions
