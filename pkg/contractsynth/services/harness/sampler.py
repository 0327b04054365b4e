"""Random inputs satisfying the assumptions from a given state."""

from __future__ import annotations

import logging
import random
from fractions import Fraction
from typing import List, Mapping, Optional

from ...core.logic import TRUE, Cmp, Formula, Iff, Model, Sort, Value, Var, const, evaluate, free_symbols
from ...core.solver import Sat, SolverSession, Unknown

logger = logging.getLogger(__name__)

# Dyadic denominators keep sampled reals exactly representable as doubles.
_DENOMINATORS = (1, 2, 4, 8)


class InputSampler:
    """Rejection sampling first, then the solver with random range hints.

    Without a session only rejection sampling is available; a state where it
    fails is then reported as a dead end.
    """

    def __init__(
        self,
        problem,
        session: Optional[SolverSession] = None,
        attempts: int = 64,
        spread: int = 10,
    ):
        self.p = problem
        self.session = session
        self.attempts = attempts
        self.spread = spread
        self.assumption: Formula = problem.assumption
        self._state_symbols = sorted(
            (v for v in free_symbols(self.assumption) if v not in problem.inputs), key=lambda v: v.name
        )

    def random_value(self, sort: Sort, rng: random.Random) -> Value:
        if sort is Sort.BOOL:
            return rng.random() < 0.5
        if sort is Sort.INT:
            return rng.randint(-self.spread, self.spread)
        denominator = rng.choice(_DENOMINATORS)
        return Fraction(rng.randint(-self.spread * denominator, self.spread * denominator), denominator)

    def _draw(self, rng: random.Random) -> Model:
        return {v.name: self.random_value(v.sort, rng) for v in self.p.inputs}

    def sample(self, state: Mapping[str, Value], rng: random.Random) -> Optional[Model]:
        """Input valuation (keyed by input symbols) with ``A(state, inputs)`` true, or ``None``."""
        if self.assumption == TRUE:
            return self._draw(rng)
        for _ in range(self.attempts):
            candidate = self._draw(rng)
            env = dict(state)
            env.update(candidate)
            if evaluate(self.assumption, env):
                return candidate
        if self.session is None:
            logger.warning("%s: no input satisfies the assumptions by sampling", self.p.name)
            return None
        return self._solve(state, rng)

    def _hints(self, rng: random.Random) -> List[Formula]:
        hints: List[Formula] = []
        for var in self.p.inputs:
            pivot = const(self.random_value(var.sort, rng), var.sort)
            if var.sort is Sort.BOOL:
                hints.append(Iff(var, pivot))  # type: ignore[arg-type]
            else:
                op = ">=" if rng.random() < 0.5 else "<="
                hints.append(Cmp(op, var, pivot))  # type: ignore[arg-type]
        return hints

    def _solve(self, state: Mapping[str, Value], rng: random.Random) -> Optional[Model]:
        assert self.session is not None
        pins = [_pin(v, state[v.name]) for v in self._state_symbols]
        for hints in (self._hints(rng), []):
            with self.session.scope():
                self.session.ensure_declared(self.p.inputs)
                for formula in pins + [self.assumption] + hints:
                    self.session.assert_formula(formula)
                result = self.session.check_sat()
            if isinstance(result, Sat):
                return {v.name: result.model[v.name] for v in self.p.inputs}
            if isinstance(result, Unknown):
                logger.warning("%s: input sampling undecided: %s", self.p.name, result.reason)
                return None
        logger.warning("%s: assumption dead end at state %s", self.p.name, dict(state))
        return None


def _pin(var: Var, value: Value) -> Formula:
    if var.sort is Sort.BOOL:
        return Iff(var, const(value, var.sort))  # type: ignore[arg-type]
    return Cmp("=", var, const(value, var.sort))  # type: ignore[arg-type]
