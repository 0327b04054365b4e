"""Elaborated contract: the transition-system view consumed by the synthesis engine.

Symbol naming:

* ``v``        current value of state variable ``v`` (an input's shadow is named like the input)
* ``x@in``     the input ``x`` read by the transition
* ``v@next``   the successor value of ``v``
* ``v@3``      the copy of ``v`` at path position 3
* ``x@in3``    the copy of input ``x`` read by the transition into position 3
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

from ...core.logic import TRUE, Expr, Formula, Sort, Var, conj, rename

INPUT_SUFFIX = "@in"
NEXT_SUFFIX = "@next"


def input_var(name: str, sort: Sort) -> Var:
    return Var(name + INPUT_SUFFIX, sort)


def next_var(var: Var) -> Var:
    return Var(var.name + NEXT_SUFFIX, var.sort)


def at_position(var: Var, j: int) -> Var:
    return Var(f"{var.name}@{j}", var.sort)


def input_at(var: Var, j: int) -> Var:
    """Copy of an input symbol (``x@in``) for the transition into position ``j``."""
    return Var(f"{var.name}{j}", var.sort)


def base_name(symbol: str) -> str:
    return symbol.split("@", 1)[0]


@dataclass(frozen=True)
class SymbolRef:
    """Decoded symbol: ``kind`` is current, next, input, input_copy or position."""

    base: str
    kind: str
    index: int = 0


def parse_symbol(symbol: str) -> SymbolRef:
    base, _, suffix = symbol.partition("@")
    if not suffix:
        return SymbolRef(base, "current")
    if suffix == "next":
        return SymbolRef(base, "next")
    if suffix == "in":
        return SymbolRef(base, "input")
    if suffix.startswith("in") and suffix[2:].isdigit():
        return SymbolRef(base, "input_copy", int(suffix[2:]))
    if suffix.isdigit():
        return SymbolRef(base, "position", int(suffix))
    raise ValueError(f"unrecognised symbol {symbol!r}")


@dataclass(frozen=True)
class SynthesisProblem:
    name: str
    inputs: Tuple[Var, ...]
    state: Tuple[Var, ...]
    assumption: Formula = TRUE
    init: Formula = TRUE
    trans: Formula = TRUE
    sorts: Mapping[str, Sort] = field(default_factory=dict)
    # Variables substituted away before synthesis; recomputed from their definitions.
    derived: Tuple[Var, ...] = ()
    derived_init: Mapping[str, Expr] = field(default_factory=dict)
    derived_trans: Mapping[str, Expr] = field(default_factory=dict)
    # The contract without substitution, one labelled conjunct per equation/property/shadow.
    init_conjuncts: Tuple[Tuple[str, Formula], ...] = ()
    trans_conjuncts: Tuple[Tuple[str, Formula], ...] = ()
    properties: Tuple[str, ...] = ()

    @property
    def input_names(self) -> List[str]:
        return [v.name[: -len(INPUT_SUFFIX)] for v in self.inputs]

    @property
    def next_state(self) -> Tuple[Var, ...]:
        return tuple(next_var(v) for v in self.state)

    @property
    def observables(self) -> Tuple[Var, ...]:
        """Every contract variable in declaration order (state followed by derived)."""
        return self.state + self.derived

    @property
    def full_init(self) -> Formula:
        return conj(*(f for _, f in self.init_conjuncts))

    @property
    def full_trans(self) -> Formula:
        return conj(*(f for _, f in self.trans_conjuncts))

    def shadow_of(self, input_symbol: Var) -> Var:
        return Var(input_symbol.name[: -len(INPUT_SUFFIX)], input_symbol.sort)

    def step_renaming(self, prev: int, nxt: int) -> Dict[str, str]:
        """Names mapping ``G_T(s, i, s')`` to ``G_T(s_prev, i_nxt, s_nxt)``."""
        names = {v.name: at_position(v, prev).name for v in self.state}
        names.update({v.name: input_at(v, nxt).name for v in self.inputs})
        names.update({next_var(v).name: at_position(v, nxt).name for v in self.state})
        return names

    def position_renaming(self, j: int) -> Dict[str, str]:
        return {v.name: at_position(v, j).name for v in self.state}

    def assumption_at(self, j: int, input_position: int = 0) -> Formula:
        """``A(s_j, i)``, or ``A(s_j, i_p)`` for a positive ``input_position``."""
        names = self.position_renaming(j)
        if input_position:
            names.update({v.name: input_at(v, input_position).name for v in self.inputs})
        return rename(self.assumption, names)  # type: ignore[return-value]

    def trans_at(self, prev: int, nxt: int) -> Formula:
        return rename(self.trans, self.step_renaming(prev, nxt))  # type: ignore[return-value]

    def init_at(self, j: int) -> Formula:
        return rename(self.init, self.position_renaming(j))  # type: ignore[return-value]

    def final_trans(self, j: int) -> Formula:
        """``G_T(s_j, i, s')`` with the problem's own input and successor names."""
        return rename(self.trans, self.position_renaming(j))  # type: ignore[return-value]
