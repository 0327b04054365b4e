"""k-inductive realizability: alternate extend and base checks until one decides."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from ..core.errors import RejectedInputError
from ..core.logic import Model, conj, evaluate, simplify
from ..core.smtlib import declaration, sort_name, symbol, to_smtlib
from ..core.solver import Sat, SolverSession, Unsat, logic_for
from ..core.solver import Unknown as SolverUnknown
from .frontend.problem import SynthesisProblem, at_position, input_at
from .skolem import (
    DEFAULT_CAP,
    CertificateReport,
    GuardedSkolem,
    Invalid,
    QuantifiedCheck,
    Valid,
    ae_val,
    certify_all,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Realizable:
    k: int
    init_model: Model
    skolems: Tuple[GuardedSkolem, ...]
    checks: Tuple[QuantifiedCheck, ...] = field(default=(), compare=False)

    @property
    def extend(self) -> GuardedSkolem:
        return self.skolems[-1]


@dataclass(frozen=True)
class Unrealizable:
    depth: int
    witness: Model
    stage: str = "base"


@dataclass(frozen=True)
class Unknown:
    stage: str
    reason: str


SynthesisResult = Union[Realizable, Unrealizable, Unknown]


# --------------------------------------------------------------------------- checks


def _path(p: SynthesisProblem, n: int) -> Tuple[tuple, list]:
    universals = [at_position(v, 0) for v in p.state]
    premise = []
    for j in range(1, n + 1):
        universals.extend(input_at(v, j) for v in p.inputs)
        universals.extend(at_position(v, j) for v in p.state)
        premise.append(p.assumption_at(j - 1, j))
        premise.append(p.trans_at(j - 1, j))
    universals.extend(p.inputs)
    premise.append(p.assumption_at(n))
    return tuple(universals), premise


def build_extend_check(p: SynthesisProblem, n: int) -> QuantifiedCheck:
    """``A``-respecting paths of length ``n`` followed by one more input; is the last state extendable?"""
    if n < 0:
        raise ValueError("depth must be non-negative")
    universals, premise = _path(p, n)
    assumed = simplify(conj(*premise))
    goal = p.final_trans(n)
    return QuantifiedCheck("extend", n, universals, p.next_state, assumed, goal)  # type: ignore[arg-type]


def build_base_check(p: SynthesisProblem, i: int) -> QuantifiedCheck:
    if i < 0:
        raise ValueError("depth must be non-negative")
    universals, premise = _path(p, i)
    assumed = simplify(conj(p.init_at(0), *premise))
    goal = p.final_trans(i)
    return QuantifiedCheck("base", i, universals, p.next_state, assumed, goal)  # type: ignore[arg-type]


def check_initial_nonempty(
    p: SynthesisProblem, session: SolverSession
) -> Union[Model, Unrealizable, Unknown]:
    with session.scope():
        session.ensure_declared(p.state)
        session.assert_formula(p.init)
        result = session.check_sat()
    if isinstance(result, Unsat):
        logger.info("%s: no initial state satisfies the guarantees", p.name)
        return Unrealizable(0, {}, stage="init")
    if isinstance(result, SolverUnknown):
        return Unknown("init", result.reason)
    assert isinstance(result, Sat)
    return {v.name: result.model[v.name] for v in p.state}


def query_text(check: QuantifiedCheck) -> str:
    """The check as one quantified SMT-LIB query, unsat iff the check is valid."""
    bound = " ".join(f"({symbol(v.name)} {sort_name(v.sort)})" for v in check.existentials)
    lines = [f"; {check.tag}", "(set-logic ALL)"]
    lines.extend(declaration(v) for v in check.universals)
    lines.append(f"(assert {to_smtlib(check.premise)})")
    lines.append(f"(assert (not (exists ({bound}) {to_smtlib(check.goal)})))")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def dump_query(check: QuantifiedCheck, directory: str) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{check.tag}.smt2")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(query_text(check))
    logger.debug("wrote %s", path)
    return path


# --------------------------------------------------------------------------- driver


class RealizabilityEngine:
    """Runs the alternation on two solver sessions, one per check kind."""

    def __init__(
        self,
        problem: SynthesisProblem,
        solver_command: List[str],
        max_k: int = 8,
        timeout_ms: int = 30000,
        mbp_cap: int = DEFAULT_CAP,
        dump_dir: Optional[str] = None,
    ):
        if max_k < 0:
            raise ValueError("max_k must be non-negative")
        self.problem = problem
        self.solver_command = list(solver_command)
        self.max_k = max_k
        self.timeout_ms = timeout_ms
        self.mbp_cap = mbp_cap
        self.dump_dir = dump_dir
        self.logic = logic_for(problem.sorts.values())

    def session(self, name: str) -> SolverSession:
        return SolverSession(self.solver_command, self.logic, self.timeout_ms, name=name)

    def _prepare(self, check: QuantifiedCheck) -> QuantifiedCheck:
        if self.dump_dir:
            dump_query(check, self.dump_dir)
        return check

    def run(self) -> SynthesisResult:
        p = self.problem
        with self.session("extend") as extend_session, self.session("base") as base_session:
            init = check_initial_nonempty(p, base_session)
            if not isinstance(init, dict):
                return init
            skolems: List[GuardedSkolem] = []
            checks: List[QuantifiedCheck] = []
            for i in range(self.max_k + 1):
                extend = self._prepare(build_extend_check(p, i))
                outcome = ae_val(extend_session, extend, self.mbp_cap)
                if isinstance(outcome, SolverUnknown):
                    return Unknown(extend.tag, outcome.reason)
                if isinstance(outcome, Valid):
                    skolems.append(outcome.skolem)
                    checks.append(extend)
                    logger.info("%s: realizable with k=%d", p.name, i)
                    return Realizable(i, init, tuple(skolems), tuple(checks))
                logger.info("%s: %s not valid, checking base", p.name, extend.tag)

                base = self._prepare(build_base_check(p, i))
                outcome = ae_val(base_session, base, self.mbp_cap)
                if isinstance(outcome, SolverUnknown):
                    return Unknown(base.tag, outcome.reason)
                if isinstance(outcome, Invalid):
                    logger.info("%s: unrealizable at depth %d", p.name, i)
                    return Unrealizable(i, outcome.witness)
                skolems.append(outcome.skolem)
                checks.append(base)
        logger.info("%s: undecided up to k=%d", p.name, self.max_k)
        return Unknown("bound", "bound exhausted")

    def certify(self, result: Realizable) -> CertificateReport:
        """Re-check every Skolem of ``result`` on a fresh session."""
        checks = result.checks or self.rebuild_checks(result.k)
        with self.session("certify") as session:
            init_ok = initial_state_ok(self.problem, result.init_model)
            return certify_all(session, checks, result.skolems, init_ok)

    def rebuild_checks(self, k: int) -> Tuple[QuantifiedCheck, ...]:
        checks = [build_base_check(self.problem, j) for j in range(k)]
        checks.append(build_extend_check(self.problem, k))
        return tuple(checks)


def initial_state_ok(p: SynthesisProblem, init_model: Model) -> bool:
    try:
        return bool(evaluate(p.init, init_model))
    except RejectedInputError:
        logger.warning("%s: initial model does not cover the state", p.name)
        return False


def run(problem: SynthesisProblem, max_k: int, solver_command: List[str], **options) -> SynthesisResult:
    return RealizabilityEngine(problem, solver_command, max_k=max_k, **options).run()
