"""Data carried between the realizability engine and the Skolem machinery."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple, Union

from ...core.logic import FALSE, Expr, FIte, Formula, Ite, Model, Sort, Var, zero
from ...core.solver import Unknown


@dataclass(frozen=True)
class QuantifiedCheck:
    """``forall universals . premise => exists existentials . goal``."""

    kind: str  # "base" or "extend"
    depth: int
    universals: Tuple[Var, ...]
    existentials: Tuple[Var, ...]
    premise: Formula
    goal: Formula

    @property
    def tag(self) -> str:
        return f"{self.kind}_{self.depth}"


def skolem_tags(k: int) -> List[str]:
    """Tags of a depth-``k`` result, in order: ``base_0..base_{k-1}`` then ``extend_k``."""
    return [f"base_{j}" for j in range(k)] + [f"extend_{k}"]


@dataclass(frozen=True)
class LocalRelation:
    """Per-existential atoms recorded while projecting one case.

    ``order`` is the elimination order; each existential's atoms only mention
    universals and existentials eliminated after it.
    """

    order: Tuple[Var, ...]
    atoms: Mapping[str, Tuple[Formula, ...]]


@dataclass(frozen=True)
class SkolemCase:
    guard: Formula
    assigns: Mapping[str, Expr]
    relation: Optional[LocalRelation] = field(default=None, compare=False)


@dataclass
class GuardedSkolem:
    """Ordered guarded cases; the first case whose guard holds supplies the witness."""

    kind: str
    depth: int
    universals: Tuple[Var, ...]
    existentials: Tuple[Var, ...]
    cases: List[SkolemCase] = field(default_factory=list)

    @property
    def tag(self) -> str:
        return f"{self.kind}_{self.depth}"

    def as_terms(self) -> Dict[str, Expr]:
        """One nested if-then-else per existential, defaulting to the last case."""
        terms: Dict[str, Expr] = {}
        for var in self.existentials:
            if not self.cases:
                terms[var.name] = zero(var.sort) if var.sort.numeric else FALSE
                continue
            term = self.cases[-1].assigns[var.name]
            for case in reversed(self.cases[:-1]):
                branch = case.assigns[var.name]
                if var.sort is Sort.BOOL:
                    term = FIte(case.guard, branch, term)  # type: ignore[arg-type]
                else:
                    term = Ite(case.guard, branch, term)  # type: ignore[arg-type]
            terms[var.name] = term
        return terms


@dataclass(frozen=True)
class Valid:
    skolem: GuardedSkolem


@dataclass(frozen=True)
class Invalid:
    witness: Model


AevalResult = Union[Valid, Invalid, Unknown]
