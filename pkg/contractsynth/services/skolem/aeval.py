"""Validity of ``S(x) => exists y . T(x, y)`` with Skolem extraction.

Each iteration finds a universal point ``x`` that satisfies ``S`` and is not
yet covered, asks for existentials that satisfy ``T`` at that point, and
generalises the answer into a guarded case through model-based projection.
The guards cover ``S`` once the uncovered region becomes empty.
"""

from __future__ import annotations

import logging
from typing import Dict

from ...core.logic import Cmp, Expr, Iff, Model, Sort, Var, const, negate, zero_value
from ...core.solver import Sat, SolverSession, Unknown, Unsat
from .mbp import mbp
from .refiner import refine
from .types import AevalResult, GuardedSkolem, Invalid, QuantifiedCheck, SkolemCase, Valid

logger = logging.getLogger(__name__)

DEFAULT_CAP = 512


def _pinned(var: Var, model: Model):
    value = const(model.get(var.name, zero_value(var.sort)), var.sort)
    if var.sort is Sort.BOOL:
        return Iff(var, value)  # type: ignore[arg-type]
    return Cmp("=", var, value)  # type: ignore[arg-type]


def ae_val(session: SolverSession, check: QuantifiedCheck, cap: int = DEFAULT_CAP) -> AevalResult:
    """Decide ``check`` on ``session``; the session is left as it was found."""
    skolem = GuardedSkolem(check.kind, check.depth, check.universals, check.existentials)
    with session.scope():
        session.ensure_declared(check.universals + check.existentials)
        session.assert_formula(check.premise)
        for iteration in range(cap):
            uncovered = session.check_sat()
            if isinstance(uncovered, Unsat):
                logger.info("%s: valid with %d cases", check.tag, len(skolem.cases))
                return Valid(skolem)
            if isinstance(uncovered, Unknown):
                logger.warning("%s: solver gave up on coverage: %s", check.tag, uncovered.reason)
                return uncovered
            witness = {v.name: uncovered.model[v.name] for v in check.universals}
            with session.scope():
                for var in check.universals:
                    session.assert_formula(_pinned(var, witness))
                session.assert_formula(check.goal)
                answer = session.check_sat()
            if isinstance(answer, Unsat):
                logger.info("%s: invalid after %d cases", check.tag, len(skolem.cases))
                return Invalid(witness)
            if isinstance(answer, Unknown):
                logger.warning("%s: solver gave up on extension: %s", check.tag, answer.reason)
                return answer
            assert isinstance(answer, Sat)
            projection, relation = mbp(answer.model, check.existentials, check.goal)
            functions = refine(relation)
            assigns: Dict[str, Expr] = {
                v.name: functions.get(v.name, const(zero_value(v.sort), v.sort)) for v in check.existentials
            }
            skolem.cases.append(SkolemCase(projection, assigns, relation))
            logger.debug("%s: case %d guard %r", check.tag, iteration, projection)
            session.assert_formula(negate(projection))
    logger.warning("%s: projection cap of %d reached", check.tag, cap)
    return Unknown("mbp cap")
