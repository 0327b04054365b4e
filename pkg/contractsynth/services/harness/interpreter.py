"""Exact interpretation of a synthesized implementation over rationals."""

from __future__ import annotations

import logging
from typing import List, Mapping, Optional, Sequence

from ...core.errors import CoverageHoleError, InternalError
from ...core.logic import Model, Value, evaluate
from ..frontend.problem import SynthesisProblem, at_position, input_at, next_var, parse_symbol
from ..skolem.types import GuardedSkolem

logger = logging.getLogger(__name__)


def window_valuation(p: SynthesisProblem, window: Sequence[Model], inputs: Mapping[str, Value]) -> Model:
    """Bind the symbols of a check to a run: path position ``j`` is ``window[j]``."""
    valuation: Model = {}
    for j, state in enumerate(window):
        for var in p.state:
            valuation[at_position(var, j).name] = state[var.name]
        if j > 0:
            for var in p.inputs:
                valuation[input_at(var, j).name] = state[p.shadow_of(var).name]
    valuation.update(inputs)
    return valuation


def initial_state(p: SynthesisProblem, init_model: Mapping[str, Value]) -> Model:
    state: Model = {v.name: init_model[v.name] for v in p.state}
    for var in p.derived:
        state[var.name] = evaluate(p.derived_init[var.name], state)
    return state


def derive(
    p: SynthesisProblem, prev: Mapping[str, Value], inputs: Mapping[str, Value], nxt: Model
) -> Model:
    """Complete ``nxt`` with the values of the inlined variables."""
    if not p.derived:
        return nxt
    env: Model = dict(prev)
    env.update(inputs)
    env.update({next_var(v).name: nxt[v.name] for v in p.state})
    for var in p.derived:
        nxt[var.name] = evaluate(p.derived_trans[var.name], env)
    return nxt


def interpret_step(
    p: SynthesisProblem,
    skolems: Sequence[GuardedSkolem],
    history: Sequence[Model],
    inputs: Mapping[str, Value],
) -> Model:
    """Next state after reading ``inputs``.

    ``history`` holds the states reached so far, oldest first, trimmed to the
    last ``k + 1``; while it is shorter than that the matching base cascade
    applies, afterwards the extend cascade.
    """
    k = len(skolems) - 1
    if not history:
        raise InternalError("interpret_step needs at least the initial state")
    window = list(history[-(k + 1):])
    skolem = skolems[len(window) - 1] if len(window) <= k else skolems[k]
    valuation = window_valuation(p, window, inputs)
    for case in skolem.cases:
        if evaluate(case.guard, valuation):
            nxt: Model = {}
            for name, term in case.assigns.items():
                nxt[parse_symbol(name).base] = evaluate(term, valuation)
            return derive(p, window[-1], inputs, nxt)
    raise CoverageHoleError(f"no case of {skolem.tag} applies", valuation)


class Implementation:
    """A running instance: the interpreter counterpart of the generated C step API."""

    def __init__(
        self, p: SynthesisProblem, init_model: Mapping[str, Value], skolems: Sequence[GuardedSkolem]
    ):
        self.p = p
        self.init_model = dict(init_model)
        self.skolems = list(skolems)
        self.k = len(self.skolems) - 1
        self.history: List[Model] = []
        self.reset()

    @classmethod
    def from_result(cls, p: SynthesisProblem, result) -> "Implementation":
        return cls(p, result.init_model, result.skolems)

    @property
    def state(self) -> Optional[Model]:
        return self.history[-1] if self.history else None

    def reset(self) -> Model:
        self.history = [initial_state(self.p, self.init_model)]
        return self.history[0]

    def step(self, inputs: Mapping[str, Value]) -> Model:
        nxt = interpret_step(self.p, self.skolems, self.history, inputs)
        self.history.append(nxt)
        del self.history[: -(self.k + 1)]
        return nxt
